//! Scorer contract and the reference biaffine scorer.

use std::collections::HashMap;
use std::ops::Range;

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Mode, TrainConfig};
use crate::error::{Error, Result};
use crate::types::{ArcScores, C2fArcScores, CharSentence, LabelScores};

/// Arc scores of a sentence: one table, or one per arc role.
#[derive(Clone, Debug, PartialEq)]
pub enum ArcTables {
    Single(ArcScores),
    Dual(C2fArcScores),
}

impl ArcTables {
    pub fn n(&self) -> usize {
        match self {
            ArcTables::Single(s) => s.n(),
            ArcTables::Dual(s) => s.n(),
        }
    }
}

/// Everything a scorer emits for one sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct Scores {
    pub arcs: ArcTables,
    pub labels: LabelScores,
    /// Per-character BMES tag scores (indexed by [`Bmes::index`]); entry 0
    /// belongs to character 1.
    pub tags: Option<Vec<[f64; 4]>>,
}

/// Gradient of a loss with respect to the arc tables.
#[derive(Clone, Debug, PartialEq)]
pub enum ArcGrads {
    Single(ArcScores),
    Dual { intra: ArcScores, inter: ArcScores },
}

/// Gradient of a loss with respect to every output of [`Scores`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreGrads {
    pub arcs: ArcGrads,
    pub labels: LabelScores,
    pub tags: Option<Vec<[f64; 4]>>,
}

/// A trainable mapping from sentences to score tables.
///
/// Implementations must be deterministic functions of their parameters and
/// input. `backprop` adds the gradient of a loss with respect to the
/// parameters into `grad`, given the gradient with respect to the scores; it
/// is the only place gradients are accumulated, so callers may run it on
/// per-worker buffers and merge them by addition.
pub trait Scorer: Send + Sync {
    fn params(&self) -> &[f64];
    fn params_mut(&mut self) -> &mut [f64];
    fn score(&self, sentence: &CharSentence) -> Result<Scores>;
    fn backprop(
        &self,
        sentence: &CharSentence,
        upstream: &ScoreGrads,
        grad: &mut [f64],
    ) -> Result<()>;
}

/// Scorer without parameters: all arc, label and tag scores are zero.
#[derive(Clone, Debug)]
pub struct ConstantScorer {
    pub mode: Mode,
    pub num_labels: usize,
}

impl Scorer for ConstantScorer {
    fn params(&self) -> &[f64] {
        &[]
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut []
    }

    fn score(&self, sentence: &CharSentence) -> Result<Scores> {
        let n = sentence.len();
        let arcs = if self.mode.is_c2f() {
            ArcTables::Dual(C2fArcScores::new(ArcScores::zeros(n), ArcScores::zeros(n))?)
        } else {
            ArcTables::Single(ArcScores::zeros(n))
        };
        Ok(Scores {
            arcs,
            labels: LabelScores::zeros(n, self.num_labels),
            tags: self.mode.has_tagger().then(|| vec![[0.0; 4]; n]),
        })
    }

    fn backprop(&self, _: &CharSentence, _: &ScoreGrads, _: &mut [f64]) -> Result<()> {
        Ok(())
    }
}

/// Padding token id (outside the sentence).
pub const PAD: usize = 0;
/// Token id of the artificial ROOT position.
pub const ROOT: usize = 1;
/// Token id of characters unseen in training.
pub const UNK: usize = 2;
const SPECIALS: usize = 3;

/// Character vocabulary: ids `0..3` are PAD, ROOT and UNK, then the known
/// characters in code-point order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabRepr", into = "VocabRepr")]
pub struct Vocab {
    chars: Vec<char>,
    index: HashMap<char, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    chars: String,
}

impl From<VocabRepr> for Vocab {
    fn from(r: VocabRepr) -> Self {
        Vocab::from_chars(r.chars.chars())
    }
}

impl From<Vocab> for VocabRepr {
    fn from(v: Vocab) -> Self {
        VocabRepr {
            chars: v.chars.iter().collect(),
        }
    }
}

impl Vocab {
    pub fn from_chars(chars: impl IntoIterator<Item = char>) -> Self {
        let mut chars: Vec<char> = chars.into_iter().collect();
        chars.sort_unstable();
        chars.dedup();
        let index = chars
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i + SPECIALS))
            .collect();
        Vocab { chars, index }
    }

    pub fn build<'a>(sentences: impl IntoIterator<Item = &'a CharSentence>) -> Self {
        Vocab::from_chars(
            sentences
                .into_iter()
                .flat_map(|s| s.chars().iter().copied()),
        )
    }

    /// Number of ids including the special tokens.
    pub fn size(&self) -> usize {
        self.chars.len() + SPECIALS
    }

    pub fn id(&self, c: char) -> usize {
        self.index.get(&c).copied().unwrap_or(UNK)
    }

    /// Token ids of ROOT followed by the sentence's characters.
    pub fn encode(&self, sentence: &CharSentence) -> Vec<usize> {
        std::iter::once(ROOT)
            .chain(sentence.chars().iter().map(|&c| self.id(c)))
            .collect()
    }
}

/// Characters on each side of a position that enter its feature vector.
pub const WINDOW: usize = 2;
const WIDTH: usize = 2 * WINDOW + 1;

/// Shape of the reference scorer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiaffineShape {
    pub vocab_size: usize,
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub num_labels: usize,
    pub distance_clip: usize,
    /// Number of arc score tables: 1, or 2 for intra/inter roles.
    pub roles: usize,
    pub tagger: bool,
}

impl BiaffineShape {
    pub fn new(vocab: &Vocab, num_labels: usize, cfg: &TrainConfig) -> Self {
        BiaffineShape {
            vocab_size: vocab.size(),
            embedding_dim: cfg.embedding_dim,
            hidden_dim: cfg.hidden_dim,
            num_labels,
            distance_clip: cfg.distance_clip,
            roles: if cfg.mode.is_c2f() { 2 } else { 1 },
            tagger: cfg.mode.has_tagger(),
        }
    }
}

/// Offsets of every parameter block in the flat vector.
#[derive(Clone, Debug)]
struct Layout {
    emb: Range<usize>,
    wh: Range<usize>,
    bh: Range<usize>,
    wm: Range<usize>,
    bm: Range<usize>,
    /// Bilinear arc form per role, `(k+1) x (k+1)`.
    u: Vec<Range<usize>>,
    /// Distance bias per role, `2D+1` entries.
    dist: Vec<Range<usize>>,
    /// Bilinear label forms, `L x (k+1) x (k+1)`.
    v: Range<usize>,
    wt: Range<usize>,
    bt: Range<usize>,
    total: usize,
}

impl Layout {
    fn new(shape: &BiaffineShape) -> Self {
        let mut at = 0;
        let mut take = |len: usize| {
            let r = at..at + len;
            at += len;
            r
        };
        let (d, k) = (shape.embedding_dim, shape.hidden_dim);
        let emb = take(shape.vocab_size * d);
        let wh = take(k * WIDTH * d);
        let bh = take(k);
        let wm = take(k * WIDTH * d);
        let bm = take(k);
        let u = (0..shape.roles).map(|_| take((k + 1) * (k + 1))).collect();
        let dist = (0..shape.roles)
            .map(|_| take(2 * shape.distance_clip + 1))
            .collect();
        let v = take(shape.num_labels * (k + 1) * (k + 1));
        let tags = if shape.tagger { 4 } else { 0 };
        let wt = take(tags * WIDTH * d);
        let bt = take(tags);
        Layout {
            emb,
            wh,
            bh,
            wm,
            bm,
            u,
            dist,
            v,
            wt,
            bt,
            total: at,
        }
    }
}

fn mat<'a>(p: &'a [f64], r: &Range<usize>, cols: usize) -> ArrayView2<'a, f64> {
    ArrayView2::from_shape((r.len() / cols.max(1), cols), &p[r.clone()]).expect("layout block")
}

fn mat_mut<'a>(p: &'a mut [f64], r: &Range<usize>, cols: usize) -> ArrayViewMut2<'a, f64> {
    ArrayViewMut2::from_shape((r.len() / cols.max(1), cols), &mut p[r.clone()])
        .expect("layout block")
}

fn vec_view<'a>(p: &'a [f64], r: &Range<usize>) -> ArrayView1<'a, f64> {
    ArrayView1::from(&p[r.clone()])
}

fn vec_mut<'a>(p: &'a mut [f64], r: &Range<usize>) -> ArrayViewMut1<'a, f64> {
    ArrayViewMut1::from(&mut p[r.clone()])
}

/// Intermediate values of one forward pass.
struct Forward {
    tokens: Vec<usize>,
    x: Array2<f64>,
    /// `[tanh(x Wh^T + bh), 1]`
    ht: Array2<f64>,
    /// `[tanh(x Wm^T + bm), 1]`
    mt: Array2<f64>,
}

/// Reference scorer: character embeddings, a ±[`WINDOW`] feature window,
/// head and modifier feed-forward layers, and bilinear arc and label forms
/// with a bias input (a biaffine), plus a clipped signed-distance bias per
/// arc role. In coarse-to-fine mode intra- and inter-word arcs get separate
/// bilinear forms; in pipeline mode a linear layer scores BMES tags.
#[derive(Clone, Debug)]
pub struct BiaffineScorer {
    shape: BiaffineShape,
    vocab: Vocab,
    params: Vec<f64>,
    layout: Layout,
}

impl BiaffineScorer {
    /// Randomly initialised scorer; the draw depends only on `seed`.
    pub fn new(shape: BiaffineShape, vocab: Vocab, seed: u64) -> Self {
        let layout = Layout::new(&shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0.0; layout.total];
        let (d, k) = (shape.embedding_dim, shape.hidden_dim);
        let mut fill = |r: &Range<usize>, scale: f64, rng: &mut ChaCha8Rng| {
            for p in &mut params[r.clone()] {
                *p = rng.gen_range(-scale..scale);
            }
        };
        fill(&layout.emb, 1.0, &mut rng);
        let ff = (6.0 / (WIDTH * d + k) as f64).sqrt();
        fill(&layout.wh, ff, &mut rng);
        fill(&layout.wm, ff, &mut rng);
        let bil = (1.0 / (k + 1) as f64).sqrt() * 0.1;
        for r in &layout.u {
            fill(r, bil, &mut rng);
        }
        fill(&layout.v, bil, &mut rng);
        let tag = (6.0 / (WIDTH * d + 4) as f64).sqrt();
        fill(&layout.wt, tag, &mut rng);
        BiaffineScorer {
            shape,
            vocab,
            params,
            layout,
        }
    }

    /// Rebuilds a scorer from stored parameters.
    pub fn from_parts(shape: BiaffineShape, vocab: Vocab, params: Vec<f64>) -> Result<Self> {
        let layout = Layout::new(&shape);
        if shape.vocab_size != vocab.size() {
            return Err(Error::Model(format!(
                "vocabulary has {} ids but the scorer expects {}",
                vocab.size(),
                shape.vocab_size
            )));
        }
        if params.len() != layout.total {
            return Err(Error::Model(format!(
                "expected {} parameters, found {}",
                layout.total,
                params.len()
            )));
        }
        Ok(BiaffineScorer {
            shape,
            vocab,
            params,
            layout,
        })
    }

    pub fn shape(&self) -> &BiaffineShape {
        &self.shape
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn into_params(self) -> Vec<f64> {
        self.params
    }

    fn layout(&self) -> &Layout {
        &self.layout
    }

    fn dist_index(&self, h: usize, m: usize) -> usize {
        let d = self.shape.distance_clip as isize;
        ((m as isize - h as isize).clamp(-d, d) + d) as usize
    }

    fn forward(&self, sentence: &CharSentence) -> Forward {
        let lay = self.layout();
        let p = &self.params;
        let (d, k) = (self.shape.embedding_dim, self.shape.hidden_dim);
        let tokens = self.vocab.encode(sentence);
        let n1 = tokens.len();
        let emb = mat(p, &lay.emb, d);
        let mut x = Array2::zeros((n1, WIDTH * d));
        for i in 0..n1 {
            for j in 0..WIDTH {
                let t = token_at(&tokens, i, j);
                x.slice_mut(s![i, j * d..(j + 1) * d]).assign(&emb.row(t));
            }
        }
        let hidden = |w: &Range<usize>, b: &Range<usize>| {
            let a = x.dot(&mat(p, w, WIDTH * d).t()) + vec_view(p, b);
            let mut out = Array2::ones((n1, k + 1));
            out.slice_mut(s![.., ..k]).assign(&a.mapv(f64::tanh));
            out
        };
        let ht = hidden(&lay.wh, &lay.bh);
        let mt = hidden(&lay.wm, &lay.bm);
        Forward { tokens, x, ht, mt }
    }

    fn role_scores(&self, f: &Forward, role: usize) -> ArcScores {
        let lay = self.layout();
        let k1 = self.shape.hidden_dim + 1;
        let s =
            f.ht.dot(&mat(&self.params, &lay.u[role], k1))
                .dot(&f.mt.t());
        let dist = &self.params[lay.dist[role].clone()];
        ArcScores::from_fn(f.tokens.len() - 1, |h, m| {
            s[[h, m]] + dist[self.dist_index(h, m)]
        })
    }
}

fn token_at(tokens: &[usize], i: usize, j: usize) -> usize {
    let p = i + j;
    if p < WINDOW || p - WINDOW >= tokens.len() {
        PAD
    } else {
        tokens[p - WINDOW]
    }
}

/// `(n+1) x (n+1)` matrix of an arc table's off-diagonal, non-ROOT-column
/// entries.
fn arc_matrix(t: &ArcScores) -> Array2<f64> {
    let n1 = t.n() + 1;
    Array2::from_shape_fn(
        (n1, n1),
        |(h, m)| if m == 0 || h == m { 0.0 } else { t.get(h, m) },
    )
}

impl Scorer for BiaffineScorer {
    fn params(&self) -> &[f64] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn score(&self, sentence: &CharSentence) -> Result<Scores> {
        let f = self.forward(sentence);
        let lay = self.layout();
        let n = sentence.len();
        let k1 = self.shape.hidden_dim + 1;
        let arcs = if self.shape.roles == 2 {
            ArcTables::Dual(C2fArcScores::new(
                self.role_scores(&f, 0),
                self.role_scores(&f, 1),
            )?)
        } else {
            ArcTables::Single(self.role_scores(&f, 0))
        };
        let nl = self.shape.num_labels;
        let v = &self.params[lay.v.clone()];
        let mut labels = LabelScores::zeros(n, nl);
        for l in 0..nl {
            let vl = ArrayView2::from_shape((k1, k1), &v[l * k1 * k1..(l + 1) * k1 * k1])
                .expect("label block");
            let t = f.ht.dot(&vl).dot(&f.mt.t());
            for h in 0..=n {
                for m in 1..=n {
                    if h != m {
                        labels.set(h, m, l, t[[h, m]]);
                    }
                }
            }
        }
        let tags = self.shape.tagger.then(|| {
            let d = self.shape.embedding_dim;
            let t = f.x.dot(&mat(&self.params, &lay.wt, WIDTH * d).t())
                + vec_view(&self.params, &lay.bt);
            (1..=n)
                .map(|i| [t[[i, 0]], t[[i, 1]], t[[i, 2]], t[[i, 3]]])
                .collect()
        });
        Ok(Scores { arcs, labels, tags })
    }

    fn backprop(&self, sentence: &CharSentence, up: &ScoreGrads, grad: &mut [f64]) -> Result<()> {
        let lay = self.layout().clone();
        if grad.len() != lay.total {
            return Err(Error::LengthMismatch {
                expected: lay.total,
                got: grad.len(),
            });
        }
        let n = sentence.len();
        let n1 = n + 1;
        let f = self.forward(sentence);
        let p = &self.params;
        let (d, k) = (self.shape.embedding_dim, self.shape.hidden_dim);
        let k1 = k + 1;
        let mut dht = Array2::<f64>::zeros((n1, k1));
        let mut dmt = Array2::<f64>::zeros((n1, k1));

        let tables: Vec<&ArcScores> = match (&up.arcs, self.shape.roles) {
            (ArcGrads::Single(g), 1) => vec![g],
            (ArcGrads::Dual { intra, inter }, 2) => vec![intra, inter],
            _ => {
                return Err(Error::Model(
                    "arc gradient shape does not match the scorer mode".into(),
                ))
            }
        };
        for (role, g) in tables.into_iter().enumerate() {
            if g.n() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: g.n(),
                });
            }
            let gm = arc_matrix(g);
            let u = mat(p, &lay.u[role], k1);
            let gmt = gm.dot(&f.mt);
            mat_mut(grad, &lay.u[role], k1).scaled_add(1.0, &f.ht.t().dot(&gmt));
            dht += &gmt.dot(&u.t());
            dmt += &gm.t().dot(&f.ht).dot(&u);
            let dist = &mut grad[lay.dist[role].clone()];
            for h in 0..=n {
                for m in 1..=n {
                    if h != m {
                        dist[self.dist_index(h, m)] += gm[[h, m]];
                    }
                }
            }
        }

        let nl = self.shape.num_labels;
        if up.labels.n() != n || up.labels.num_labels() != nl {
            return Err(Error::LengthMismatch {
                expected: nl,
                got: up.labels.num_labels(),
            });
        }
        for l in 0..nl {
            let block = lay.v.start + l * k1 * k1..lay.v.start + (l + 1) * k1 * k1;
            let gl = Array2::from_shape_fn((n1, n1), |(h, m)| {
                if m == 0 || h == m {
                    0.0
                } else {
                    up.labels.get(h, m, l)
                }
            });
            let vl = mat(p, &block, k1);
            let glm = gl.dot(&f.mt);
            mat_mut(grad, &block, k1).scaled_add(1.0, &f.ht.t().dot(&glm));
            dht += &glm.dot(&vl.t());
            dmt += &gl.t().dot(&f.ht).dot(&vl);
        }

        let mut dx = Array2::<f64>::zeros((n1, WIDTH * d));
        for (dt, t, w, b) in [
            (&dht, &f.ht, &lay.wh, &lay.bh),
            (&dmt, &f.mt, &lay.wm, &lay.bm),
        ] {
            let act = t.slice(s![.., ..k]);
            let da = &dt.slice(s![.., ..k]) * &act.mapv(|a| 1.0 - a * a);
            mat_mut(grad, w, WIDTH * d).scaled_add(1.0, &da.t().dot(&f.x));
            vec_mut(grad, b).scaled_add(1.0, &da.sum_axis(Axis(0)));
            dx += &da.dot(&mat(p, w, WIDTH * d));
        }

        match (&up.tags, self.shape.tagger) {
            (Some(tg), true) => {
                if tg.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: tg.len(),
                    });
                }
                let mut dt = Array2::<f64>::zeros((n1, 4));
                for (i, row) in tg.iter().enumerate() {
                    dt.row_mut(i + 1).assign(&Array1::from(row.to_vec()));
                }
                mat_mut(grad, &lay.wt, WIDTH * d).scaled_add(1.0, &dt.t().dot(&f.x));
                vec_mut(grad, &lay.bt).scaled_add(1.0, &dt.sum_axis(Axis(0)));
                dx += &dt.dot(&mat(p, &lay.wt, WIDTH * d));
            }
            (None, _) => {}
            (Some(_), false) => {
                return Err(Error::Model(
                    "tag gradient given to a scorer without tagger".into(),
                ))
            }
        }

        let mut demb = mat_mut(grad, &lay.emb, d);
        for i in 0..n1 {
            for j in 0..WIDTH {
                let t = token_at(&f.tokens, i, j);
                let mut row = demb.row_mut(t);
                row += &dx.slice(s![i, j * d..(j + 1) * d]);
            }
        }
        Ok(())
    }
}
