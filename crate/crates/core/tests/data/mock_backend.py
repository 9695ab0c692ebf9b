#!/usr/bin/env python3
"""Mock stage backend speaking the newline-delimited JSON protocol.

Reads one request per line from stdin and answers on stdout. The first
argument selects a behaviour:

  echo     answer each request in order (presence 1.0; types CL 0.9, rest 0.1)
  swap     buffer pairs of requests and answer them in reversed order
  stall    read requests but never answer
  dup      answer each request twice
  garbage  emit a non-JSON line for every request
"""
import json
import sys
import time

TYPES = ["LIN", "SI", "CL", "D", "HI", "PL", "TI", "PC"]


def respond(request):
    if request["task"] == "presence":
        return {"id": request["id"], "presence_prob": 1.0}
    return {
        "id": request["id"],
        "type_probs": {t: (0.9 if t == "CL" else 0.1) for t in TYPES},
    }


def emit(response):
    sys.stdout.write(json.dumps(response) + "\n")
    sys.stdout.flush()


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "echo"
    buffered = []
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        if mode == "echo":
            emit(respond(request))
        elif mode == "swap":
            buffered.append(request)
            if len(buffered) == 2:
                for pending in reversed(buffered):
                    emit(respond(pending))
                buffered = []
        elif mode == "stall":
            time.sleep(3600)
        elif mode == "dup":
            emit(respond(request))
            emit(respond(request))
        elif mode == "garbage":
            sys.stdout.write("this is not json\n")
            sys.stdout.flush()
        else:
            raise SystemExit(f"unknown mode {mode!r}")


if __name__ == "__main__":
    main()
