use super::{DocScores, NliError, SentenceScores};
use crate::backend::{NliBackend, NliPair, SIMPLEX_TOLERANCE};
use crate::corpus::SegmentedText;

/// Pairs per backend call when building a matrix. Rows are grouped until
/// this many pairs accumulate, so long references stream in slices.
const PAIRS_PER_CALL: usize = 256;

/// Entailment and contradiction probabilities, generated sentences (rows)
/// against reference sentences (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct NliMatrix {
    gen_sentences: Vec<String>,
    ref_sentences: Vec<String>,
    entail: Vec<f64>,
    contradict: Vec<f64>,
}

impl NliMatrix {
    /// Validates shape, ranges and `e + c <= 1` cellwise.
    pub fn new(
        gen_sentences: Vec<String>,
        ref_sentences: Vec<String>,
        entail: Vec<Vec<f64>>,
        contradict: Vec<Vec<f64>>,
    ) -> Result<Self, NliError> {
        let (n, m) = (gen_sentences.len(), ref_sentences.len());
        if n == 0 {
            return Err(NliError::EmptyInput("generated text"));
        }
        if m == 0 {
            return Err(NliError::EmptyInput("reference"));
        }
        for (name, rows) in [("entail", &entail), ("contradict", &contradict)] {
            if rows.len() != n || rows.iter().any(|r| r.len() != m) {
                return Err(NliError::Shape(format!("{name} matrix is not {n}x{m}")));
            }
        }
        let entail: Vec<f64> = entail.into_iter().flatten().collect();
        let contradict: Vec<f64> = contradict.into_iter().flatten().collect();
        for idx in 0..n * m {
            let (row, col) = (idx / m, idx % m);
            for (matrix, value) in [("entail", entail[idx]), ("contradict", contradict[idx])] {
                if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                    return Err(NliError::OutOfRange { matrix, row, col, value });
                }
            }
            let sum = entail[idx] + contradict[idx];
            if sum > 1.0 + SIMPLEX_TOLERANCE {
                return Err(NliError::Simplex { row, col, sum });
            }
        }
        Ok(Self {
            gen_sentences,
            ref_sentences,
            entail,
            contradict,
        })
    }

    pub fn rows(&self) -> usize {
        self.gen_sentences.len()
    }

    pub fn cols(&self) -> usize {
        self.ref_sentences.len()
    }

    pub fn gen_sentences(&self) -> &[String] {
        &self.gen_sentences
    }

    pub fn ref_sentences(&self) -> &[String] {
        &self.ref_sentences
    }

    pub fn entail(&self, row: usize, col: usize) -> f64 {
        self.entail[row * self.cols() + col]
    }

    pub fn contradict(&self, row: usize, col: usize) -> f64 {
        self.contradict[row * self.cols() + col]
    }

    pub fn sentence_scores(&self, index: usize) -> Result<SentenceScores, NliError> {
        if index >= self.rows() {
            return Err(NliError::Index {
                index,
                len: self.rows(),
            });
        }
        let m = self.cols();
        let row = index * m..(index + 1) * m;
        let ent = self.entail[row.clone()].iter().copied().fold(0.0, f64::max);
        let con = self.contradict[row].iter().copied().fold(0.0, f64::max);
        Ok(SentenceScores::from_maxima(ent, con))
    }

    pub fn all_sentence_scores(&self) -> Vec<SentenceScores> {
        (0..self.rows())
            .map(|i| self.sentence_scores(i).expect("index in range"))
            .collect()
    }

    pub fn doc_scores(&self) -> DocScores {
        DocScores::mean(&self.all_sentence_scores()).expect("matrix has at least one row")
    }
}

/// Queries `nli` for every (reference sentence, generated sentence) pair.
pub fn build_matrix(
    gen: &SegmentedText,
    reference: &SegmentedText,
    nli: &dyn NliBackend,
) -> Result<NliMatrix, NliError> {
    let (n, m) = (gen.sentences.len(), reference.sentences.len());
    if n == 0 {
        return Err(NliError::EmptyInput("generated text"));
    }
    if m == 0 {
        return Err(NliError::EmptyInput("reference"));
    }
    let rows_per_call = (PAIRS_PER_CALL / m).max(1);
    let mut entail = Vec::with_capacity(n);
    let mut contradict = Vec::with_capacity(n);
    for rows in gen.sentences.chunks(rows_per_call) {
        let pairs: Vec<NliPair> = rows
            .iter()
            .flat_map(|hyp| reference.sentences.iter().map(move |prem| NliPair::new(prem.clone(), hyp.clone())))
            .collect();
        let probs = nli.nli(&pairs)?;
        if probs.len() != pairs.len() {
            return Err(NliError::Shape(format!(
                "backend returned {} results for {} pairs",
                probs.len(),
                pairs.len()
            )));
        }
        for row in probs.chunks(m) {
            entail.push(row.iter().map(|p| p.entail).collect());
            contradict.push(row.iter().map(|p| p.contradict).collect());
        }
    }
    NliMatrix::new(gen.sentences.clone(), reference.sentences.clone(), entail, contradict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{BackendError, NliProbs};
    use crate::corpus::segment;

    struct Fixed(f64, f64);

    impl NliBackend for Fixed {
        fn nli(&self, pairs: &[NliPair]) -> Result<Vec<NliProbs>, BackendError> {
            Ok(pairs
                .iter()
                .map(|_| NliProbs {
                    entail: self.0,
                    neutral: 1.0 - self.0 - self.1,
                    contradict: self.1,
                })
                .collect())
        }
    }

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn one_by_one_passthrough() {
        let m = build_matrix(&segment("A b.", "en"), &segment("C d.", "en"), &Fixed(0.7, 0.1)).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert_eq!((m.entail(0, 0), m.contradict(0, 0)), (0.7, 0.1));
    }

    #[test]
    fn shape_follows_sentences() {
        let gen = segment("One. Two. Three.", "en");
        let r = segment("Alpha. Beta. Gamma. Delta.", "en");
        let m = build_matrix(&gen, &r, &Fixed(0.2, 0.3)).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 4));
    }

    #[test]
    fn empty_sides_rejected() {
        let gen = segment("One.", "en");
        assert!(matches!(
            build_matrix(&gen, &segment("", "en"), &Fixed(0.2, 0.3)),
            Err(NliError::EmptyInput("reference"))
        ));
        assert!(matches!(
            build_matrix(&segment("  ", "en"), &gen, &Fixed(0.2, 0.3)),
            Err(NliError::EmptyInput("generated text"))
        ));
    }

    #[test]
    fn validation() {
        let bad_range = NliMatrix::new(s(&["a"]), s(&["b"]), vec![vec![1.2]], vec![vec![0.0]]);
        assert!(matches!(bad_range, Err(NliError::OutOfRange { .. })));
        let bad_sum = NliMatrix::new(s(&["a"]), s(&["b"]), vec![vec![0.6]], vec![vec![0.6]]);
        assert!(matches!(bad_sum, Err(NliError::Simplex { .. })));
        let bad_shape = NliMatrix::new(s(&["a"]), s(&["b", "c"]), vec![vec![0.6]], vec![vec![0.1, 0.2]]);
        assert!(matches!(bad_shape, Err(NliError::Shape(_))));
        let nan = NliMatrix::new(s(&["a"]), s(&["b"]), vec![vec![f64::NAN]], vec![vec![0.0]]);
        assert!(nan.is_err());
    }

    #[test]
    fn row_max_scores() {
        let m = NliMatrix::new(
            s(&["x", "y"]),
            s(&["p", "q"]),
            vec![vec![0.9, 0.3], vec![0.0, 0.0]],
            vec![vec![0.05, 0.01], vec![0.0, 0.0]],
        )
        .unwrap();
        let first = m.sentence_scores(0).unwrap();
        assert_eq!((first.ent, first.con), (0.9, 0.05));
        let second = m.sentence_scores(1).unwrap();
        assert_eq!((second.ent, second.con, second.diff, second.unv), (0.0, 0.0, 0.0, 1.0));
        assert!(matches!(m.sentence_scores(2), Err(NliError::Index { index: 2, len: 2 })));
    }

    #[test]
    fn wide_reference_is_chunked() {
        struct Counting(std::sync::Mutex<Vec<usize>>);
        impl NliBackend for Counting {
            fn nli(&self, pairs: &[NliPair]) -> Result<Vec<NliProbs>, BackendError> {
                self.0.lock().unwrap().push(pairs.len());
                Fixed(0.5, 0.1).nli(pairs)
            }
        }
        let gen = segment(&"Sentence here. ".repeat(5), "en");
        let r = segment(&"Ref line. ".repeat(100), "en");
        let backend = Counting(Default::default());
        let m = build_matrix(&gen, &r, &backend).unwrap();
        assert_eq!((m.rows(), m.cols()), (5, 100));
        assert_eq!(*backend.0.lock().unwrap(), vec![200, 200, 100]);
    }
}
