use srllab::corpus::{read_jsonl, Sentence, Style};
use srllab::layers::{EncoderConfig, WordReprConfig};
use srllab::models::{
    EncoderKind, Factorization, ModelConfig, ModelError, SrlModel, SyntaxEncoderConfig, SyntaxMode, SyntaxSource,
};
use srllab::numcore::{gradient_check, Graph, Var};

const TOL: f64 = 1e-4;

const DEP: &str = r#"{"tokens":["the","dog","chased","a","cat"],"lemmas":["the","dog","chase","a","cat"],"pos":["DT","NN","VBD","DT","NN"],"dep_heads":[2,3,0,5,3],"dep_rels":["NMOD","SBJ","ROOT","NMOD","OBJ"],"constituents":[[1,5,"S"],[1,2,"NP"],[3,5,"VP"],[4,5,"NP"]],"frames":[{"predicate":3,"sense":"chase.01","style":"dep","args":[[2,"A0"],[5,"A1"]]}]}"#;
const SPAN: &str = r#"{"tokens":["the","dog","chased","a","cat"],"lemmas":["the","dog","chase","a","cat"],"pos":["DT","NN","VBD","DT","NN"],"dep_heads":[2,3,0,5,3],"dep_rels":["NMOD","SBJ","ROOT","NMOD","OBJ"],"constituents":[[1,5,"S"],[1,2,"NP"],[3,5,"VP"],[4,5,"NP"]],"frames":[{"predicate":3,"sense":"chase.01","style":"span","args":[[1,2,"A0"],[4,5,"A1"]]}]}"#;

fn tiny(factorization: Factorization, style: Style, syntax: SyntaxMode) -> ModelConfig {
    ModelConfig {
        factorization,
        style,
        syntax,
        word: WordReprConfig {
            indicator: 2,
            char_out: 0,
            random_word: 2,
            pretrained: 0,
            lemma: 0,
            pos: 2,
            external: 0,
        },
        encoder: EncoderConfig {
            layers: 1,
            hidden: 2,
            dropout_keep: 1.0,
        },
        syntax_encoder: SyntaxEncoderConfig {
            layers: 1,
            dim: 2,
            source: SyntaxSource::Dep,
            spos_dim: 2,
        },
        mlp_hidden: vec![3],
        head_dim: 3,
        beta_p: 1.0,
        beta_a: 1.0,
        span_attn_hidden: 2,
        size_dim: 2,
        unary_hidden: 2,
        seed: 11,
        ..ModelConfig::default()
    }
}

fn check(cfg: ModelConfig, data: &str) -> f64 {
    let corpus: Vec<Sentence> = read_jsonl(data).unwrap();
    let model = SrlModel::new(cfg, &corpus).unwrap();
    let mut store = model.store.clone();
    gradient_check(&mut store, |g: &mut Graph| -> Result<Var, ModelError> {
        Ok(model.loss(g, &corpus[0])?.expect("sentence has decisions"))
    })
    .unwrap()
}

#[test]
fn sequence_models() {
    for (style, data) in [(Style::Dep, DEP), (Style::Span, SPAN)] {
        let e = check(tiny(Factorization::Sequence, style, SyntaxMode::None), data);
        assert!(e < TOL, "{:?}: {}", style, e);
    }
    let e = check(
        tiny(Factorization::Sequence, Style::Dep, SyntaxMode::HardPrune { k: 1 }),
        DEP,
    );
    assert!(e < TOL, "hard prune: {}", e);
}

#[test]
fn tree_models() {
    for given in [true, false] {
        let mut cfg = tiny(Factorization::Tree, Style::Dep, SyntaxMode::SoftPrune { top_k: 5 });
        cfg.given_predicates = given;
        let e = check(cfg, DEP);
        assert!(e < TOL, "given={}: {}", given, e);
    }
}

#[test]
fn graph_models() {
    for (style, data, syntax) in [
        (Style::Dep, DEP, SyntaxMode::None),
        (Style::Span, SPAN, SyntaxMode::None),
        (Style::Span, SPAN, SyntaxMode::ConstPrune),
    ] {
        for given in [true, false] {
            let mut cfg = tiny(Factorization::Graph, style, syntax);
            cfg.given_predicates = given;
            let e = check(cfg, data);
            assert!(e < TOL, "{:?} {:?} given={}: {}", style, syntax, given, e);
        }
    }
}

#[test]
fn syntax_encoders() {
    for kind in [EncoderKind::Gcn, EncoderKind::SaLstm, EncoderKind::TreeLstm] {
        for source in [SyntaxSource::Dep, SyntaxSource::Const] {
            let mut cfg = tiny(Factorization::Sequence, Style::Dep, SyntaxMode::Encoder { kind });
            cfg.syntax_encoder.source = source;
            let e = check(cfg, DEP);
            assert!(e < TOL, "{:?} {:?}: {}", kind, source, e);
        }
    }
}
