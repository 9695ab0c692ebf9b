//! Inter-annotator agreement metrics: Cohen's kappa for two annotators
//! and Krippendorff's alpha (nominal form) for two or more, plus the
//! per-argument-type agreement over two annotators' corpora.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::{ArgumentType, Corpus};

#[derive(Debug, Error)]
pub enum AgreementError {
    #[error("label sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("matrix needs at least 2 annotators, got {0}")]
    TooFewAnnotators(usize),
    #[error("fewer than 2 pairable values overall")]
    NothingPairable,
    #[error("paragraph id mismatch between corpora: {0}")]
    UnitMismatch(String),
}

/// Units x annotators matrix of optional category codes.
///
/// Missing values are allowed and excluded from pairing.
#[derive(Debug, Clone)]
pub struct AnnotationMatrix<C> {
    units: Vec<String>,
    annotators: Vec<String>,
    /// values[unit][annotator]
    values: Vec<Vec<Option<C>>>,
}

impl<C: Clone + Ord> AnnotationMatrix<C> {
    pub fn new(
        units: Vec<String>,
        annotators: Vec<String>,
        values: Vec<Vec<Option<C>>>,
    ) -> Result<Self, AgreementError> {
        if annotators.len() < 2 {
            return Err(AgreementError::TooFewAnnotators(annotators.len()));
        }
        assert_eq!(units.len(), values.len(), "one value row per unit");
        for row in &values {
            assert_eq!(row.len(), annotators.len(), "one value per annotator");
        }
        Ok(AnnotationMatrix {
            units,
            annotators,
            values,
        })
    }

    /// Convenience constructor for two complete annotation sequences.
    pub fn from_pair(a: &[C], b: &[C]) -> Result<Self, AgreementError> {
        if a.len() != b.len() {
            return Err(AgreementError::LengthMismatch(a.len(), b.len()));
        }
        let units = (0..a.len()).map(|i| format!("u{i}")).collect();
        let values = a
            .iter()
            .zip(b)
            .map(|(x, y)| vec![Some(x.clone()), Some(y.clone())])
            .collect();
        AnnotationMatrix::new(units, vec!["A".to_string(), "B".to_string()], values)
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn annotators(&self) -> &[String] {
        &self.annotators
    }

    /// Units with at least two non-missing values.
    pub fn n_pairable_units(&self) -> usize {
        self.values
            .iter()
            .filter(|row| row.iter().flatten().count() >= 2)
            .count()
    }
}

/// Cohen's kappa for exactly two annotators.
///
/// kappa = (p_o - p_e) / (1 - p_e) with p_e from the product of the two
/// annotators' marginals. Returns exactly 1 for perfect agreement with a
/// degenerate (p_e = 1) marginal.
pub fn cohen_kappa<C: Ord + Clone>(labels_a: &[C], labels_b: &[C]) -> Result<f64, AgreementError> {
    if labels_a.len() != labels_b.len() {
        return Err(AgreementError::LengthMismatch(labels_a.len(), labels_b.len()));
    }
    if labels_a.is_empty() {
        return Err(AgreementError::Empty);
    }
    let n = labels_a.len() as f64;
    let mut marginal_a: BTreeMap<&C, f64> = BTreeMap::new();
    let mut marginal_b: BTreeMap<&C, f64> = BTreeMap::new();
    let mut agree = 0.0;
    for (a, b) in labels_a.iter().zip(labels_b) {
        *marginal_a.entry(a).or_default() += 1.0;
        *marginal_b.entry(b).or_default() += 1.0;
        if a == b {
            agree += 1.0;
        }
    }
    let p_o = agree / n;
    let p_e: f64 = marginal_a
        .iter()
        .map(|(cat, count_a)| {
            let count_b = marginal_b.get(cat).copied().unwrap_or(0.0);
            (count_a / n) * (count_b / n)
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-12 {
        // both marginals concentrated on one shared category
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Krippendorff's alpha in the nominal-data coincidence-matrix form.
///
/// alpha = 1 - D_o / D_e over pairable values; missing values are
/// excluded from pairing. Returns 1 when there is no observed
/// disagreement.
pub fn krippendorff_alpha<C: Ord + Clone>(
    matrix: &AnnotationMatrix<C>,
) -> Result<f64, AgreementError> {
    // coincidence matrix, built unit by unit
    let mut coincidence: BTreeMap<(C, C), f64> = BTreeMap::new();
    let mut totals: BTreeMap<C, f64> = BTreeMap::new();
    let mut n_values = 0.0;
    for row in &matrix.values {
        let present: Vec<&C> = row.iter().flatten().collect();
        let m = present.len();
        if m < 2 {
            continue;
        }
        let weight = 1.0 / (m as f64 - 1.0);
        for (i, c) in present.iter().enumerate() {
            for (j, k) in present.iter().enumerate() {
                if i == j {
                    continue;
                }
                *coincidence.entry(((*c).clone(), (*k).clone())).or_default() += weight;
            }
            *totals.entry((*c).clone()).or_default() += 1.0;
            n_values += 1.0;
        }
    }
    if n_values < 2.0 {
        return Err(AgreementError::NothingPairable);
    }
    let observed_disagreement: f64 = coincidence
        .iter()
        .filter(|((c, k), _)| c != k)
        .map(|(_, count)| *count)
        .sum();
    if observed_disagreement == 0.0 {
        return Ok(1.0);
    }
    let expected: f64 = totals.values().map(|nc| nc * (n_values - nc)).sum();
    Ok(1.0 - (n_values - 1.0) * observed_disagreement / expected)
}

/// Per-argument-type Krippendorff alpha between two annotators' versions
/// of the same corpus.
///
/// For each type a binary matrix is built (unit = paragraph, value =
/// presence of the type) and its nominal alpha returned.
pub fn per_type_agreement(
    corpus_a: &Corpus,
    corpus_b: &Corpus,
) -> Result<BTreeMap<ArgumentType, f64>, AgreementError> {
    let matrices = per_type_matrices(corpus_a, corpus_b)?;
    let mut out = BTreeMap::new();
    for (ty, matrix) in matrices {
        out.insert(ty, krippendorff_alpha(&matrix)?);
    }
    Ok(out)
}

/// The binary presence matrices behind [`per_type_agreement`], exposed so
/// callers can also report pairable-unit counts.
pub fn per_type_matrices(
    corpus_a: &Corpus,
    corpus_b: &Corpus,
) -> Result<BTreeMap<ArgumentType, AnnotationMatrix<bool>>, AgreementError> {
    if corpus_a.len() != corpus_b.len() {
        return Err(AgreementError::UnitMismatch(format!(
            "{} vs {} documents",
            corpus_a.len(),
            corpus_b.len()
        )));
    }
    let mut units = Vec::new();
    let mut presences: BTreeMap<ArgumentType, Vec<Vec<Option<bool>>>> = ArgumentType::ALL
        .iter()
        .map(|t| (*t, Vec::new()))
        .collect();
    for (doc_a, doc_b) in corpus_a.documents.iter().zip(&corpus_b.documents) {
        if doc_a.doc_id != doc_b.doc_id {
            return Err(AgreementError::UnitMismatch(format!(
                "doc {:?} vs {:?}",
                doc_a.doc_id, doc_b.doc_id
            )));
        }
        if doc_a.paragraphs.len() != doc_b.paragraphs.len() {
            return Err(AgreementError::UnitMismatch(format!(
                "doc {:?}: {} vs {} paragraphs",
                doc_a.doc_id,
                doc_a.paragraphs.len(),
                doc_b.paragraphs.len()
            )));
        }
        for (pa, pb) in doc_a.paragraphs.iter().zip(&doc_b.paragraphs) {
            if pa.para_id != pb.para_id {
                return Err(AgreementError::UnitMismatch(format!(
                    "doc {:?}: paragraph {:?} vs {:?}",
                    doc_a.doc_id, pa.para_id, pb.para_id
                )));
            }
            units.push(format!("{}/{}", doc_a.doc_id, pa.para_id));
            for ty in ArgumentType::ALL {
                presences.get_mut(&ty).unwrap().push(vec![
                    Some(pa.argument_types.contains(&ty)),
                    Some(pb.argument_types.contains(&ty)),
                ]);
            }
        }
    }
    let annotators = vec!["A".to_string(), "B".to_string()];
    let mut out = BTreeMap::new();
    for (ty, values) in presences {
        out.insert(
            ty,
            AnnotationMatrix::new(units.clone(), annotators.clone(), values)?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kappa_perfect_agreement() {
        let a = vec![0, 1, 0, 1, 1, 0];
        assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn kappa_from_confusion_counts() {
        // confusion [[20,5],[10,15]] (a = rows, b = cols): p_o = 0.7, p_e = 0.5
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (x, y, count) in [(0, 0, 20), (0, 1, 5), (1, 0, 10), (1, 1, 15)] {
            for _ in 0..count {
                a.push(x);
                b.push(y);
            }
        }
        let kappa = cohen_kappa(&a, &b).unwrap();
        assert!((kappa - 0.4).abs() < 1e-12, "kappa = {kappa}");
    }

    #[test]
    fn kappa_errors() {
        assert!(matches!(
            cohen_kappa(&[1, 2], &[1]),
            Err(AgreementError::LengthMismatch(2, 1))
        ));
        let empty: [i32; 0] = [];
        assert!(matches!(cohen_kappa(&empty, &empty), Err(AgreementError::Empty)));
    }

    #[test]
    fn alpha_perfect_binary_agreement() {
        let a = vec![1, 0, 1, 1, 0, 0];
        let m = AnnotationMatrix::from_pair(&a, &a).unwrap();
        assert_eq!(krippendorff_alpha(&m).unwrap(), 1.0);
        assert_eq!(m.n_pairable_units(), 6);
    }

    #[test]
    fn alpha_two_unit_disagreement_is_minus_half() {
        // coincidence matrix: n = 4, D_o = 1, D_e = 2/3
        let m = AnnotationMatrix::from_pair(&[1, 0], &[0, 1]).unwrap();
        let alpha = krippendorff_alpha(&m).unwrap();
        assert!((alpha - (-0.5)).abs() < 1e-12, "alpha = {alpha}");
    }

    #[test]
    fn alpha_chance_level_near_zero() {
        // statistical oracle: shuffled labels agree at chance only
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a: Vec<u8> = (0..1000).map(|i| (i % 2) as u8).collect();
        let mut b = a.clone();
        a.shuffle(&mut rng);
        b.shuffle(&mut rng);
        let m = AnnotationMatrix::from_pair(&a, &b).unwrap();
        let alpha = krippendorff_alpha(&m).unwrap();
        assert!(alpha.abs() < 0.05, "alpha = {alpha}");
    }

    #[test]
    fn alpha_handles_missing_values() {
        let m = AnnotationMatrix::new(
            vec!["u0".into(), "u1".into(), "u2".into()],
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                vec![Some(1), Some(1), None],
                vec![Some(0), None, Some(0)],
                vec![None, Some(1), Some(1)],
            ],
        )
        .unwrap();
        assert_eq!(krippendorff_alpha(&m).unwrap(), 1.0);
        assert_eq!(m.n_pairable_units(), 3);
    }

    #[test]
    fn alpha_too_few_pairable() {
        let m = AnnotationMatrix::new(
            vec!["u0".into()],
            vec!["A".into(), "B".into()],
            vec![vec![Some(1), None]],
        )
        .unwrap();
        assert!(matches!(
            krippendorff_alpha(&m),
            Err(AgreementError::NothingPairable)
        ));
    }

    #[test]
    fn unit_permutation_and_annotator_swap_invariance() {
        let a = vec![1, 0, 1, 1, 0, 1, 0, 0];
        let b = vec![1, 1, 1, 0, 0, 1, 0, 1];
        let kappa = cohen_kappa(&a, &b).unwrap();
        assert_eq!(cohen_kappa(&b, &a).unwrap(), kappa);
        let alpha = krippendorff_alpha(&AnnotationMatrix::from_pair(&a, &b).unwrap()).unwrap();
        assert_eq!(
            krippendorff_alpha(&AnnotationMatrix::from_pair(&b, &a).unwrap()).unwrap(),
            alpha
        );
        let mut idx: Vec<usize> = (0..a.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        idx.shuffle(&mut rng);
        let pa: Vec<i32> = idx.iter().map(|i| a[*i]).collect();
        let pb: Vec<i32> = idx.iter().map(|i| b[*i]).collect();
        assert!((cohen_kappa(&pa, &pb).unwrap() - kappa).abs() < 1e-12);
        assert!(
            (krippendorff_alpha(&AnnotationMatrix::from_pair(&pa, &pb).unwrap()).unwrap() - alpha)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn alpha_invariant_under_category_relabeling() {
        let a = vec![1, 0, 2, 1, 0, 2, 2];
        let b = vec![1, 1, 2, 0, 0, 2, 1];
        let alpha = krippendorff_alpha(&AnnotationMatrix::from_pair(&a, &b).unwrap()).unwrap();
        // bijection 0 -> 7, 1 -> 3, 2 -> 5
        let relabel = |v: &[i32]| -> Vec<i32> { v.iter().map(|x| [7, 3, 5][*x as usize]).collect() };
        let alpha2 =
            krippendorff_alpha(&AnnotationMatrix::from_pair(&relabel(&a), &relabel(&b)).unwrap())
                .unwrap();
        assert!((alpha - alpha2).abs() < 1e-12);
    }
}
