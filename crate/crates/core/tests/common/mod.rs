//! Shared fixtures for integration tests.
// not every test target uses every helper
#![allow(dead_code)]

use argmine::corpus::{ArgumentType, Corpus, Court, Document, HolisticLabel, Paragraph};
use argmine::features::FeatureVector;
use chrono::NaiveDate;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn paragraph(id: &str, text: &str, types: &[ArgumentType]) -> Paragraph {
    Paragraph {
        para_id: id.to_string(),
        text: text.to_string(),
        argument_types: types.iter().copied().collect(),
    }
}

pub fn document(
    doc_id: &str,
    court: Court,
    year: i32,
    label: Option<HolisticLabel>,
    types_per_para: &[&[ArgumentType]],
) -> Document {
    Document {
        doc_id: doc_id.to_string(),
        court,
        decision_date: NaiveDate::from_ymd_opt(year, 6, 15).unwrap(),
        holistic_label: label,
        paragraphs: types_per_para
            .iter()
            .enumerate()
            .map(|(i, types)| {
                paragraph(
                    &format!("p{}", i + 1),
                    &format!("paragraph {} of decision {} with some filler text", i + 1, doc_id),
                    types,
                )
            })
            .collect(),
        extra: serde_json::Map::new(),
    }
}

/// A 20-document synthetic corpus with hand-enumerated counts.
///
/// Tallies (verified by hand when the fixture was laid out):
/// frequencies LIN 3, SI 4, CL 14, D 2, HI 2, PL 7, TI 7, PC 4 (sum 43);
/// existence LIN 3, SI 4, CL 11, D 2, HI 2, PL 7, TI 7, PC 4;
/// holistic SC 7 formalistic / 5 non-formalistic, SAC 4/4;
/// 49 paragraphs: 12 with no argument, 31 with one, 6 with two;
/// exactly one document (sc04) has no arguments at all.
pub fn synthetic_corpus() -> Corpus {
    use ArgumentType::*;
    use Court::*;
    use HolisticLabel::*;
    let f = Some(Formalistic);
    let nf = Some(NonFormalistic);
    let docs = vec![
        document("sc01", Sc, 2003, f, &[&[Cl], &[Cl], &[]]),
        document("sc02", Sc, 2005, f, &[&[Lin, Cl], &[]]),
        document("sc03", Sc, 2007, f, &[&[Si], &[Cl], &[]]),
        document("sc04", Sc, 2009, f, &[&[], &[]]),
        document("sc05", Sc, 2011, f, &[&[Cl, Si], &[Lin], &[]]),
        document("sc06", Sc, 2013, f, &[&[D], &[Cl]]),
        document("sc07", Sc, 2015, f, &[&[Cl], &[Cl], &[Cl]]),
        document("sc08", Sc, 2017, nf, &[&[Pl], &[Ti], &[]]),
        document("sc09", Sc, 2019, nf, &[&[Ti, Pl], &[Cl]]),
        document("sc10", Sc, 2021, nf, &[&[Pc], &[Ti]]),
        document("sc11", Sc, 2022, nf, &[&[Hi], &[Pl], &[Ti]]),
        document("sc12", Sc, 2023, nf, &[&[Pl, Pc], &[]]),
        document("sac01", Sac, 2004, f, &[&[Cl], &[Si]]),
        document("sac02", Sac, 2006, f, &[&[Lin], &[Cl], &[]]),
        document("sac03", Sac, 2008, f, &[&[Cl], &[]]),
        document("sac04", Sac, 2010, f, &[&[Si, Cl], &[D]]),
        document("sac05", Sac, 2014, nf, &[&[Ti], &[Pl]]),
        document("sac06", Sac, 2018, nf, &[&[Pl], &[Hi], &[]]),
        document("sac07", Sac, 2020, nf, &[&[Ti, Pc], &[]]),
        document("sac08", Sac, 2023, nf, &[&[Pl], &[Ti], &[Pc]]),
    ];
    Corpus::from_documents(docs).unwrap()
}

/// Synthetic training data where a single feature decides the label:
/// relative frequency of PL above 20 means non-formalistic.
pub fn pl_threshold_set(seed: u64, n: usize) -> Vec<(FeatureVector, HolisticLabel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pl_idx = ArgumentType::ALL
        .iter()
        .position(|t| *t == ArgumentType::Pl)
        .unwrap();
    let cl_idx = ArgumentType::ALL
        .iter()
        .position(|t| *t == ArgumentType::Cl)
        .unwrap();
    (0..n)
        .map(|_| {
            let pl: f64 = rng.gen_range(0.0..60.0);
            let label = if pl > 20.0 {
                HolisticLabel::NonFormalistic
            } else {
                HolisticLabel::Formalistic
            };
            let mut rel_freq = [0.0; 8];
            rel_freq[pl_idx] = pl;
            rel_freq[cl_idx] = 100.0 - pl;
            (
                FeatureVector {
                    doc_length_tokens: rng.gen_range(500..5000),
                    n_arguments: rng.gen_range(1..30),
                    avg_argument_length_tokens: rng.gen_range(20.0..80.0),
                    rel_freq,
                },
                label,
            )
        })
        .collect()
}
