use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srllab::corpus::{build_vocab, DepTree, Sentence, Token, Vocab};
use srllab::layers::{
    AffineHeads, BiLstm, Biaffine, CharEncoder, EncoderConfig, Gcn, LayerError, Mlp, ParamBuilder, SaLstm, SpanRepr,
    TokenIds, TreeLstm, Unary, WordRepr, WordReprConfig,
};
use srllab::numcore::{gradient_check, Axis, Graph, NumError, ParamStore, Tensor, Var};

const TOL: f64 = 1e-4;

fn rand_tensor(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Tensor {
    Tensor::uniform(&[r, c], -1.0, 1.0, rng)
}

/// Random linear readout so every output coordinate gets a distinct weight.
fn readout(g: &mut Graph, v: Var, seed: u64) -> Result<Var, NumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = g.value(v).shape().to_vec();
    let r = g.constant(Tensor::uniform(&shape, -1.0, 1.0, &mut rng));
    let m = g.mul(v, r)?;
    Ok(g.sum_all(m))
}

fn check<F>(store: &mut ParamStore, f: F) -> f64
where
    F: Fn(&mut Graph) -> Result<Var, LayerError>,
{
    gradient_check(store, f).unwrap()
}

fn relations() -> Vocab {
    Vocab::build(["nsubj", "obj", "root", "det"], 1)
}

fn tree() -> DepTree {
    DepTree::new(
        vec![2, 0, 4, 2],
        ["nsubj", "root", "det", "obj"].iter().map(|s| s.to_string()).collect(),
    )
    .unwrap()
}

#[test]
fn primitives() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut store = ParamStore::new();
    let a = store.add("a", rand_tensor(&mut rng, 3, 4)).unwrap();
    let b = store.add("b", rand_tensor(&mut rng, 4, 2)).unwrap();
    let c = store.add("c", rand_tensor(&mut rng, 3, 4)).unwrap();
    let s = store.add("s", rand_tensor(&mut rng, 3, 1)).unwrap();
    let r = store.add("r", rand_tensor(&mut rng, 1, 4)).unwrap();
    let p = store.add("p", Tensor::uniform(&[3, 4], 0.5, 2.0, &mut rng)).unwrap();
    let err = gradient_check(&mut store, |g: &mut Graph| -> Result<Var, NumError> {
        let (va, vb, vc, vs, vr, vp) = (g.param(a), g.param(b), g.param(c), g.param(s), g.param(r), g.param(p));
        let mut terms = Vec::new();
        let add = g.add(va, vc)?;
        terms.push(readout(g, add, 1)?);
        let sub = g.sub(va, vc)?;
        terms.push(readout(g, sub, 2)?);
        let mul = g.mul(va, vc)?;
        terms.push(readout(g, mul, 3)?);
        let mm = g.matmul(va, vb)?;
        terms.push(readout(g, mm, 4)?);
        let cat_c = g.concat(&[va, vc], Axis::Cols)?;
        terms.push(readout(g, cat_c, 5)?);
        let cat_r = g.concat(&[va, vc], Axis::Rows)?;
        terms.push(readout(g, cat_r, 6)?);
        let sl = g.slice(va, Axis::Cols, 1, 2)?;
        terms.push(readout(g, sl, 7)?);
        let sr = g.sum(va, Axis::Rows);
        terms.push(readout(g, sr, 8)?);
        let sc = g.sum(va, Axis::Cols);
        terms.push(readout(g, sc, 9)?);
        let sg = g.sigmoid(va);
        terms.push(readout(g, sg, 10)?);
        let th = g.tanh(va);
        terms.push(readout(g, th, 11)?);
        let rl = g.relu(va);
        terms.push(readout(g, rl, 12)?);
        let lg = g.log(vp);
        terms.push(readout(g, lg, 13)?);
        let smc = g.softmax(va, Axis::Cols);
        terms.push(readout(g, smc, 14)?);
        let smr = g.softmax(va, Axis::Rows);
        terms.push(readout(g, smr, 15)?);
        let ga = g.gather(va, &[2, 0, 2])?;
        terms.push(readout(g, ga, 16)?);
        let mp = g.max_pool(va);
        terms.push(readout(g, mp, 17)?);
        let ar = g.add_row(va, vr)?;
        terms.push(readout(g, ar, 18)?);
        let sr2 = g.scale_rows(va, vs)?;
        terms.push(readout(g, sr2, 19)?);
        let tr = g.transpose(va);
        terms.push(readout(g, tr, 20)?);
        let rs = g.reshape(va, &[2, 6])?;
        terms.push(readout(g, rs, 21)?);
        let sc2 = g.scale(va, 0.3);
        terms.push(readout(g, sc2, 22)?);
        let dr = g.dropout(va, 0.8);
        terms.push(readout(g, dr, 23)?);
        terms.push(g.cross_entropy(va, &[1, 3, 0])?);
        terms.push(g.bce_with_logits(vs, &[1.0, 0.0, 1.0])?);
        let all = g.concat(&terms, Axis::Rows)?;
        Ok(g.sum_all(all))
    })
    .unwrap();
    assert!(err < TOL, "primitives: {}", err);
}

#[test]
fn mlp_and_affine_heads() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = rand_tensor(&mut rng, 3, 5);
    let mut store = ParamStore::new();
    let mlp = Mlp::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("mlp"), 5, &[6, 4], 3).unwrap();
    let heads = AffineHeads::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("heads"), 5, 4).unwrap();
    let err = check(&mut store, |g| {
        let xv = g.constant(x.clone());
        let s = mlp.forward(g, xv)?;
        let (p, a) = heads.forward(g, xv)?;
        let l1 = g.cross_entropy(s, &[0, 2, 1])?;
        let l2 = readout(g, p, 1)?;
        let l3 = readout(g, a, 2)?;
        let t = g.add(l1, l2)?;
        Ok(g.add(t, l3)?)
    });
    assert!(err < TOL, "{}", err);
}

#[test]
fn bilstm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = rand_tensor(&mut rng, 4, 3);
    let mut store = ParamStore::new();
    let cfg = EncoderConfig {
        layers: 2,
        hidden: 3,
        dropout_keep: 0.8,
    };
    let enc = BiLstm::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("enc"), 3, &cfg).unwrap();
    let err = check(&mut store, |g| {
        let xv = g.constant(x.clone());
        let h = enc.encode(g, xv)?;
        Ok(readout(g, h, 5)?)
    });
    assert!(err < TOL, "{}", err);
}

#[test]
fn char_encoder() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut store = ParamStore::new();
    let enc = CharEncoder::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("char"), 6, 4).unwrap();
    let err = check(&mut store, |g| {
        let a = enc.encode(g, &[2, 3, 4])?;
        let b = enc.encode(g, &[5])?;
        let c = g.concat(&[a, b], Axis::Rows)?;
        Ok(readout(g, c, 6)?)
    });
    assert!(err < TOL, "{}", err);
}

#[test]
fn word_repr() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut s = Sentence::new(vec![Token::new("Dogs", "dog", "N"), Token::new("bark", "bark", "V")]);
    s.ext_vectors = Some(vec![vec![0.1, 0.2], vec![-0.3, 0.4]]);
    let vocabs = build_vocab(std::slice::from_ref(&s), 1);
    let cfg = WordReprConfig {
        indicator: 2,
        char_out: 4,
        random_word: 3,
        pretrained: 2,
        lemma: 2,
        pos: 2,
        external: 2,
    };
    let mut store = ParamStore::new();
    let wr = WordRepr::new(
        &mut ParamBuilder::new(&mut store, &mut rng).sub("word"),
        cfg,
        &vocabs,
        None,
        0,
    )
    .unwrap();
    let ids = TokenIds::new(&s, &vocabs);
    let err = check(&mut store, |g| {
        let x = wr.forward(g, &ids, &[0, 1])?;
        assert_eq!(g.value(x).shape(), &[2, cfg.total()]);
        Ok(readout(g, x, 7)?)
    });
    assert!(err < TOL, "{}", err);
}

#[test]
fn biaffine() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let args = rand_tensor(&mut rng, 4, 3);
    let pred = rand_tensor(&mut rng, 1, 2);
    let mut store = ParamStore::new();
    let bi = Biaffine::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("bi"), 3, 2, 5).unwrap();
    let err = check(&mut store, |g| {
        let a = g.constant(args.clone());
        let p = g.constant(pred.clone());
        let s = bi.score(g, a, p)?;
        Ok(g.cross_entropy(s, &[0, 4, 2, 1])?)
    });
    assert!(err < TOL, "{}", err);
}

#[test]
fn gcn() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = rand_tensor(&mut rng, 5, 3);
    let rel = relations();
    let mut store = ParamStore::new();
    let gcn = Gcn::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("gcn"), 3, 4, rel.len()).unwrap();
    // nonzero label biases so their gradients are exercised off the zero init
    for id in store.ids().collect::<Vec<_>>() {
        for v in store.value_mut(id).data_mut() {
            *v += rng.gen_range(-0.3..0.3);
        }
    }
    let err = check(&mut store, |g| {
        let xv = g.constant(x.clone());
        let v = gcn.forward(g, xv, &tree(), &rel)?;
        Ok(readout(g, v, 8)?)
    });
    assert!(err < TOL, "{}", err);
}

#[test]
fn salstm() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = rand_tensor(&mut rng, 4, 3);
    let rel = relations();
    let mut store = ParamStore::new();
    let sa = SaLstm::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("sa"), 3, 3, rel.len()).unwrap();
    let err = check(&mut store, |g| {
        let xv = g.constant(x.clone());
        let v = sa.forward(g, xv, &tree(), &rel)?;
        Ok(readout(g, v, 9)?)
    });
    assert!(err < TOL, "{}", err);
}

#[test]
fn treelstm() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = rand_tensor(&mut rng, 4, 3);
    let rel = relations();
    let mut store = ParamStore::new();
    let tl = TreeLstm::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("tl"), 3, 3, rel.len()).unwrap();
    for id in store.ids().collect::<Vec<_>>() {
        for v in store.value_mut(id).data_mut() {
            *v += rng.gen_range(-0.3..0.3);
        }
    }
    let err = check(&mut store, |g| {
        let xv = g.constant(x.clone());
        let v = tl.forward(g, xv, &tree(), &rel)?;
        Ok(readout(g, v, 10)?)
    });
    assert!(err < TOL, "{}", err);
}

#[test]
fn span_repr_and_unary() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let states = rand_tensor(&mut rng, 5, 3);
    let mut store = ParamStore::new();
    let sr = SpanRepr::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("span"), 3, 4, 2).unwrap();
    let un = Unary::new(
        &mut ParamBuilder::new(&mut store, &mut rng).sub("unary"),
        sr.out_dim(),
        4,
    )
    .unwrap();
    let err = check(&mut store, |g| {
        let st = g.constant(states.clone());
        let h = sr.forward(g, st, &[(1, 1), (2, 4), (1, 5), (3, 5)])?;
        let u = un.forward(g, h)?;
        Ok(readout(g, u, 11)?)
    });
    assert!(err < TOL, "{}", err);
}
