#![allow(dead_code)]

use syntrav::numerics::{Matrix, Rng};
use syntrav::treebank::{ConstituentTree, TreeNode};

pub const PHRASES: [&str; 4] = ["S", "NP", "VP", "PP"];
pub const TAGS: [&str; 3] = ["DT", "NN", "VB"];

/// Random tree with `1..=max_words` words, internal arity at most
/// `max_children`, and unary chains at most two deep above a preterminal.
pub fn random_tree(rng: &mut Rng, max_words: usize, max_children: usize) -> ConstituentTree {
    let words = rng.range_inclusive(1, max_words);
    let mut next_word = 0;
    let root = if words == 1 && rng.bernoulli(0.3) {
        preterminal(rng, &mut next_word)
    } else {
        phrase(rng, words, max_children, 0, &mut next_word)
    };
    ConstituentTree::new(root).expect("generated tree is valid")
}

fn preterminal(rng: &mut Rng, next_word: &mut usize) -> TreeNode {
    let tag = TAGS[rng.below(TAGS.len())];
    *next_word += 1;
    TreeNode::preterminal(tag, format!("w{next_word}"))
}

fn phrase(rng: &mut Rng, words: usize, max_children: usize, unary: usize, next_word: &mut usize) -> TreeNode {
    let label = PHRASES[rng.below(PHRASES.len())];
    let allow_unary = unary < 2;
    let lo = if allow_unary { 1 } else { 2.min(words) };
    let k = rng.range_inclusive(lo, max_children.min(words).max(lo));
    let children = if k == 1 {
        let child = if words == 1 && rng.bernoulli(0.5) {
            preterminal(rng, next_word)
        } else {
            phrase(rng, words, max_children, unary + 1, next_word)
        };
        vec![child]
    } else {
        split(rng, words, k)
            .into_iter()
            .map(|n| {
                if n == 1 && rng.bernoulli(0.7) {
                    preterminal(rng, next_word)
                } else {
                    phrase(rng, n, max_children, 0, next_word)
                }
            })
            .collect()
    };
    TreeNode::internal(label, children)
}

/// A random composition of `n` into `k` positive parts.
fn split(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    let mut cuts: Vec<usize> = (1..n).collect();
    rng.shuffle(&mut cuts);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain([n]) {
        parts.push(c - prev);
        prev = c;
    }
    parts
}

/// Labels and per-word anchors of a pre-order walk, computed without the
/// library's linearizer. Words are numbered left to right before walking.
pub fn oracle_walk(tree: &ConstituentTree, right_first: bool) -> (Vec<String>, Vec<usize>) {
    fn number(node: &TreeNode, counter: &mut usize, out: &mut Vec<(*const TreeNode, usize)>) {
        if node.is_preterminal() {
            out.push((node as *const _, *counter));
            *counter += 1;
        }
        for c in node.children() {
            number(c, counter, out);
        }
    }
    fn walk(
        node: &TreeNode,
        right_first: bool,
        ids: &[(*const TreeNode, usize)],
        labels: &mut Vec<String>,
        anchors: &mut [usize],
    ) {
        let Some(label) = node.label() else { return };
        if node.is_preterminal() {
            let word = ids.iter().find(|(p, _)| std::ptr::eq(*p, node)).unwrap().1;
            anchors[word] = labels.len();
        }
        labels.push(label.to_string());
        let kids = node.children();
        if right_first {
            for c in kids.iter().rev() {
                walk(c, right_first, ids, labels, anchors);
            }
        } else {
            for c in kids {
                walk(c, right_first, ids, labels, anchors);
            }
        }
    }
    let mut ids = Vec::new();
    number(tree.root(), &mut 0, &mut ids);
    let mut labels = Vec::new();
    let mut anchors = vec![usize::MAX; ids.len()];
    walk(tree.root(), right_first, &ids, &mut labels, &mut anchors);
    (labels, anchors)
}

pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.uniform(-1.0, 1.0))
}

fn block_matrix(block: &[f64]) -> Matrix {
    Matrix::from_vec(1, block.len(), block.to_vec()).unwrap()
}

/// Worst finite-difference error of the GRU backward pass on a random
/// instance, over every parameter block, the inputs, and `h0`.
pub fn gru_gradient_error(seed: u64) -> f64 {
    use syntrav::encoder::{gru_backward, gru_forward, GruParameters};
    let mut rng = Rng::new(seed);
    let (input, hidden, steps) = (rng.range_inclusive(1, 4), rng.range_inclusive(1, 5), rng.range_inclusive(1, 6));
    let params = GruParameters::random(input, hidden, 0.5, &mut rng);
    let inputs = random_matrix(&mut rng, steps, input);
    let h0: Vec<f64> = (0..hidden).map(|_| rng.uniform(-0.5, 0.5)).collect();
    let weights = random_matrix(&mut rng, steps, hidden);
    let loss = |p: &GruParameters, x: &Matrix, h: &[f64]| {
        let (states, _) = gru_forward(p, x, h).unwrap();
        states.as_slice().iter().zip(weights.as_slice()).map(|(a, b)| a * b).sum::<f64>()
    };
    let (_, cache) = gru_forward(&params, &inputs, &h0).unwrap();
    let grads = gru_backward(&params, &cache, &weights).unwrap();

    let mut worst: f64 = 0.0;
    for (b, analytic) in grads.params.blocks().iter().enumerate() {
        let f = |m: &Matrix| {
            let mut p = params.clone();
            p.blocks_mut()[b].copy_from_slice(m.as_slice());
            loss(&p, &inputs, &h0)
        };
        let at = block_matrix(params.blocks()[b]);
        worst = worst.max(syntrav::numerics::check_gradient(f, &block_matrix(analytic), &at, 1e-6).unwrap());
    }
    let e = syntrav::numerics::check_gradient(|x| loss(&params, x, &h0), &grads.inputs, &inputs, 1e-6).unwrap();
    worst = worst.max(e);
    let e = syntrav::numerics::check_gradient(
        |m| loss(&params, &inputs, m.as_slice()),
        &block_matrix(&grads.h0),
        &block_matrix(&h0),
        1e-6,
    )
    .unwrap();
    worst.max(e)
}

/// Worst finite-difference error of the NML gradient on a random table, or
/// `None` when the spectrum is too close to degenerate for differences.
pub fn nml_gradient_error(seed: u64) -> Option<f64> {
    use syntrav::nml::nml_loss;
    let mut rng = Rng::new(seed);
    let (rows, cols) = (rng.range_inclusive(2, 12), rng.range_inclusive(2, 8));
    let table = random_matrix(&mut rng, rows, cols);
    let r = nml_loss(&table).unwrap();
    let s = &r.singular_values;
    let gap = s.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    if gap < 1e-3 || *s.last().unwrap() < 1e-3 {
        return None;
    }
    Some(syntrav::numerics::check_gradient(|m| nml_loss(m).unwrap().loss, &r.grad_table, &table, 1e-6).unwrap())
}

/// Worst finite-difference error of `task + λ·nml` over every model block,
/// on a random tree of 1 to 8 words.
pub fn end_to_end_gradient_error(seed: u64) -> f64 {
    use syntrav::prosody::oracle_breaks;
    use syntrav::treebank::build_vocabulary;
    use syntrav::{Dims, Model};
    let mut rng = Rng::new(seed);
    let tree = random_tree(&mut rng, 8, 4);
    let vocab = build_vocabulary([&tree]).unwrap();
    let mut model = Model::new(vocab, Dims { d_emb: 4, d_hid: 3, d_ph: 2 }, &mut rng);
    // larger weights than the default init so every gate is exercised
    for b in model.blocks_mut() {
        rng.fill_uniform(b, -0.5, 0.5);
    }
    let labels = oracle_breaks(&tree).labels;
    let lambda = 0.05;
    let obj = model.objective(&tree, &labels, lambda).unwrap();
    let analytic: Vec<Vec<f64>> = obj.grads.blocks().iter().map(|b| b.to_vec()).collect();
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (b, grad) in analytic.iter().enumerate() {
        let at = block_matrix(probe.blocks_mut()[b]);
        let f = |m: &Matrix| {
            let mut p = model.clone();
            p.blocks_mut()[b].copy_from_slice(m.as_slice());
            p.objective(&tree, &labels, lambda).unwrap().total
        };
        worst = worst.max(syntrav::numerics::check_gradient(f, &block_matrix(grad), &at, 1e-6).unwrap());
    }
    worst
}
