//! The tensor graph on its own: a two-layer network fit with Adam, and a
//! finite-difference check of its gradients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srllab::layers::{Mlp, ParamBuilder};
use srllab::numcore::{gradient_check, AdamConfig, Graph, ParamStore, Tensor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut store = ParamStore::new();
    let mlp = Mlp::new(&mut ParamBuilder::new(&mut store, &mut rng).sub("xor"), 2, &[8], 2)?;
    let x = Tensor::from_rows(&[vec![0.1, 0.2], vec![0.1, 0.9], vec![0.8, 0.2], vec![0.9, 0.9]])?;
    let y = [0, 1, 1, 0];

    let err = gradient_check(&mut store, |g: &mut Graph| -> Result<_, srllab::layers::LayerError> {
        let xv = g.constant(x.clone());
        let s = mlp.forward(g, xv)?;
        Ok(g.cross_entropy(s, &y)?)
    })?;
    println!("gradient check max relative error {:.2e}", err);

    let adam = AdamConfig::default();
    for step in 0..=300 {
        let (loss, grads) = {
            let mut g = Graph::new(&store);
            let xv = g.constant(x.clone());
            let s = mlp.forward(&mut g, xv)?;
            let l = g.cross_entropy(s, &y)?;
            let grads = g.backward(l)?;
            (g.value(l).item(), grads)
        };
        store.adam_step(&grads, &adam)?;
        if step % 100 == 0 {
            println!("step {:3} loss {:.5}", step, loss);
        }
    }
    Ok(())
}
