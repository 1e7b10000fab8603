//! Entropy of subshifts of finite type, maximal-entropy unstable weights of
//! cylinders, and the signed unstable length on linear toral models.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{splitting, HyperbolicSplitting, IntMatrix};

/// A 0/1 transition matrix, read from and written as adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct TransitionMatrix {
    adjacency: Vec<Vec<usize>>,
}

impl TryFrom<Vec<Vec<usize>>> for TransitionMatrix {
    type Error = Error;

    fn try_from(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        TransitionMatrix::from_adjacency(adjacency)
    }
}

impl From<TransitionMatrix> for Vec<Vec<usize>> {
    fn from(t: TransitionMatrix) -> Self {
        t.adjacency
    }
}

impl TransitionMatrix {
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidParameter("a transition matrix needs at least one state".into()));
        }
        for (i, row) in adjacency.iter_mut().enumerate() {
            if let Some(&j) = row.iter().find(|&&j| j >= n) {
                return Err(Error::InvalidParameter(format!("state {i} lists successor {j} outside 0..{n}")));
            }
            row.sort_unstable();
            row.dedup();
        }
        Ok(TransitionMatrix { adjacency })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        if rows.iter().flatten().any(|&e| e > 1) {
            return Err(Error::InvalidParameter("transition matrix entries must be 0 or 1".into()));
        }
        Self::from_adjacency(
            rows.iter()
                .map(|r| r.iter().enumerate().filter(|(_, &e)| e == 1).map(|(j, _)| j).collect())
                .collect(),
        )
    }

    pub fn golden_mean() -> Self {
        Self::from_adjacency(vec![vec![0, 1], vec![0]]).expect("valid")
    }

    pub fn full_shift(n: usize) -> Self {
        Self::from_adjacency(vec![(0..n).collect(); n]).expect("valid")
    }

    pub fn states(&self) -> usize {
        self.adjacency.len()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        let n = self.states();
        (0..n).map(|i| (0..n).map(|j| self.allowed(i, j) as u8).collect()).collect()
    }

    fn reachable(&self, start: usize, reverse: bool) -> Vec<Option<usize>> {
        let n = self.states();
        let mut preds = vec![Vec::new(); n];
        if reverse {
            for (i, row) in self.adjacency.iter().enumerate() {
                for &j in row {
                    preds[j].push(i);
                }
            }
        }
        let mut level = vec![None; n];
        level[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let next = if reverse { &preds[u] } else { &self.adjacency[u] };
            for &v in next {
                if level[v].is_none() {
                    level[v] = Some(level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    }

    /// `Err(Reducible { from, to })` names a state `to` not reachable from `from`.
    pub fn check_irreducible(&self) -> Result<()> {
        for (reverse, levels) in [(false, self.reachable(0, false)), (true, self.reachable(0, true))] {
            if let Some(s) = levels.iter().position(Option::is_none) {
                let (from, to) = if reverse { (s, 0) } else { (0, s) };
                return Err(Error::Reducible { from, to });
            }
        }
        Ok(())
    }

    pub fn is_irreducible(&self) -> bool {
        self.check_irreducible().is_ok()
    }

    /// The gcd of cycle lengths through state 0 (for irreducible matrices).
    pub fn period(&self) -> usize {
        let level = self.reachable(0, false);
        let mut g = 0usize;
        for (u, row) in self.adjacency.iter().enumerate() {
            for &v in row {
                if let (Some(lu), Some(lv)) = (level[u], level[v]) {
                    g = g.gcd(&(lu + 1).abs_diff(lv));
                }
            }
        }
        g
    }

    pub fn is_aperiodic(&self) -> bool {
        self.is_irreducible() && self.period() == 1
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.adjacency.iter().map(|row| row.iter().map(|&j| v[j]).sum()).collect()
    }

    fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.states()];
        for (i, row) in self.adjacency.iter().enumerate() {
            for &j in row {
                out[j] += v[i];
            }
        }
        out
    }

    /// Checks that consecutive symbols are allowed transitions.
    pub fn check_word(&self, word: &[usize]) -> Result<()> {
        if word.is_empty() {
            return Err(Error::InvalidParameter("empty word".into()));
        }
        if let Some(&s) = word.iter().find(|&&s| s >= self.states()) {
            return Err(Error::InvalidParameter(format!("symbol {s} outside 0..{}", self.states())));
        }
        for (position, w) in word.windows(2).enumerate() {
            if !self.allowed(w[0], w[1]) {
                return Err(Error::InadmissibleWord {
                    from: w[0],
                    to: w[1],
                    position,
                });
            }
        }
        Ok(())
    }

    /// Every admissible word of length `len`, in lexicographic order.
    pub fn words(&self, len: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return Vec::new();
        }
        let mut out: Vec<Vec<usize>> = (0..self.states()).map(|s| vec![s]).collect();
        for _ in 1..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    let last = *w.last().unwrap();
                    self.adjacency[last].iter().map(move |&j| {
                        let mut v = w.clone();
                        v.push(j);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// Perron data of an irreducible transition matrix.
#[derive(Clone, Debug, Serialize)]
pub struct PerronData {
    /// Topological entropy in nats.
    pub h: f64,
    pub spectral_radius: f64,
    /// Right Perron vector, scaled so its smallest entry is 1.
    pub right_vec: Vec<f64>,
    /// Left Perron vector, scaled so that `left · right = 1`.
    pub left_vec: Vec<f64>,
    pub normalization: String,
    pub matrix: TransitionMatrix,
}

/// Stopping threshold on `‖Tr - ρr‖∞ / ρ`.
const PERRON_TOL: f64 = 1e-14;
const PERRON_MAX_ITER: usize = 1_000_000;

/// Power iteration on `I + T` (primitive whenever `T` is irreducible, with
/// the same Perron vector), starting from the all-ones vector, with a
/// Rayleigh quotient for the eigenvalue.
fn perron_vector(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> (f64, Vec<f64>) {
    let mut v = vec![1.0; n];
    let mut rho = 0.0;
    for _ in 0..PERRON_MAX_ITER {
        let tv = apply(&v);
        rho = tv.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / v.iter().map(|x| x * x).sum::<f64>();
        let resid = tv.iter().zip(&v).map(|(a, b)| (a - rho * b).abs()).fold(0.0, f64::max);
        let scale = v.iter().copied().fold(0.0, f64::max);
        if resid <= PERRON_TOL * rho.max(1.0) * scale {
            break;
        }
        let next: Vec<f64> = tv.iter().zip(&v).map(|(a, b)| a + b).collect();
        let m = next.iter().copied().fold(0.0, f64::max);
        v = next.into_iter().map(|x| x / m).collect();
    }
    (rho, v)
}

pub fn entropy_sft(t: &TransitionMatrix) -> Result<PerronData> {
    t.check_irreducible()?;
    let n = t.states();
    let (rho, right) = perron_vector(n, |v| t.apply(v));
    let (_, left) = perron_vector(n, |v| t.apply_transpose(v));
    let min = right.iter().copied().fold(f64::INFINITY, f64::min);
    let right: Vec<f64> = right.into_iter().map(|x| x / min).collect();
    let dot: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    let left: Vec<f64> = left.into_iter().map(|x| x / dot).collect();
    Ok(PerronData {
        h: rho.ln(),
        spectral_radius: rho,
        right_vec: right,
        left_vec: left,
        normalization: "right: min entry 1; left: left.right = 1".into(),
        matrix: t.clone(),
    })
}

/// `μ^u` weight of the cylinder `[i₀ … i_n]`: `e^{-nh} r[i_n]`.
pub fn rs_unstable_weight(perron: &PerronData, word: &[usize]) -> Result<f64> {
    perron.matrix.check_word(word)?;
    let n = (word.len() - 1) as f64;
    Ok((-n * perron.h).exp() * perron.right_vec[*word.last().unwrap()])
}

/// Words as digit strings when every state is a single digit, else joined by `.`.
pub fn format_word(word: &[usize], states: usize) -> String {
    let parts: Vec<String> = word.iter().map(|s| s.to_string()).collect();
    parts.join(if states <= 10 { "" } else { "." })
}

pub fn parse_word(s: &str, states: usize) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("invalid word {s:?}"));
    if states <= 10 && !s.contains('.') {
        s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect()
    } else {
        s.split('.').map(|p| p.trim().parse::<usize>().map_err(|_| bad())).collect()
    }
}

/// CSV `word,weight` for every admissible word of length `1..=max_len`.
pub fn weights_csv(perron: &PerronData, max_len: usize) -> Result<String> {
    let mut out = String::from("word,weight\n");
    let n = perron.matrix.states();
    for len in 1..=max_len {
        for w in perron.matrix.words(len) {
            let weight = rs_unstable_weight(perron, &w)?;
            writeln!(out, "{},{:.17e}", format_word(&w, n), weight).expect("writing to a String");
        }
    }
    Ok(out)
}

/// How the unstable eigenvector is scaled when measuring `l^u`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnstableNormalization {
    /// Unit Euclidean length.
    #[default]
    UnitLength,
    /// First nonzero component equal to 1.
    FirstComponent,
}

/// A piecewise-linear path in the lift `ℝᵏ` of a linear toral model.
#[derive(Clone, Debug)]
pub struct LinearModelPath {
    matrix: IntMatrix,
    split: HyperbolicSplitting,
    pub vertices: Vec<Vec<f64>>,
    pub normalization: UnstableNormalization,
}

impl LinearModelPath {
    pub fn new(matrix: &IntMatrix, vertices: Vec<Vec<f64>>) -> Result<Self> {
        let split = splitting(matrix)?;
        if split.dim_plus() != 1 {
            return Err(Error::UnstableDimension(split.dim_plus()));
        }
        if vertices.is_empty() {
            return Err(Error::InvalidParameter("a path needs at least one vertex".into()));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != matrix.dim()) {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                got: v.len(),
            });
        }
        Ok(LinearModelPath {
            matrix: matrix.clone(),
            split,
            vertices,
            normalization: UnstableNormalization::default(),
        })
    }

    pub fn with_normalization(mut self, normalization: UnstableNormalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// The same path with vertices replaced, keeping the splitting.
    pub fn with_vertices(&self, vertices: Vec<Vec<f64>>) -> Self {
        LinearModelPath {
            vertices,
            ..self.clone()
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn splitting(&self) -> &HyperbolicSplitting {
        &self.split
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        self.with_vertices(v)
    }

    /// `A ∘ γ`.
    pub fn image(&self) -> Self {
        self.with_vertices(self.vertices.iter().map(|v| self.matrix.mul_f64(v)).collect())
    }

    fn scale(&self) -> f64 {
        match self.normalization {
            UnstableNormalization::UnitLength => 1.0,
            UnstableNormalization::FirstComponent => {
                let e = &self.split.basis_plus[0];
                *e.iter().find(|x| x.abs() > 1e-12).expect("nonzero eigenvector")
            }
        }
    }
}

/// Signed `E⁺` component of the displacement, summed segment by segment.
pub fn unstable_length(model: &LinearModelPath) -> f64 {
    let scale = model.scale();
    model
        .vertices
        .windows(2)
        .map(|w| {
            let d: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
            model.split.coords(&d).0[0]
        })
        .sum::<f64>()
        * scale
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScalingCheck {
    pub original: f64,
    pub image: f64,
    /// `image / original`, or `None` for a path of zero unstable length.
    pub ratio: Option<f64>,
}

/// `(l^u(γ), l^u(A∘γ))`; the ratio is the unstable eigenvalue `±e^h`.
pub fn unstable_length_scaling_check(model: &LinearModelPath) -> ScalingCheck {
    let original = unstable_length(model);
    let image = unstable_length(&model.image());
    ScalingCheck {
        original,
        image,
        ratio: (original != 0.0).then(|| image / original),
    }
}
