//! Building an epistemic model by hand and evaluating formulas on it.

use delplan::del::EpistemicModel;
use delplan::formula::{parse_formula, Signature};

fn main() -> delplan::Result<()> {
    let sig = Signature::new(["a", "b"], ["p"])?;
    let mut m = EpistemicModel::new(sig.clone(), ["w1", "w2"])?;
    m.set_true("w1", "p")?;
    for (x, y) in [("w1", "w1"), ("w2", "w2")] {
        m.add_edge("a", x, y)?;
    }
    for x in ["w1", "w2"] {
        for y in ["w1", "w2"] {
            m.add_edge("b", x, y)?;
        }
    }
    for text in ["p", "K[a] p", "K[b] p", "K[b] (K[a] p | K[a] ~p)"] {
        let f = parse_formula(text, &sig)?;
        let truth: Vec<String> = m
            .worlds()
            .iter()
            .map(|w| Ok(format!("{w}={}", m.check(w, &f)?)))
            .collect::<delplan::Result<_>>()?;
        println!("{text:26} {}", truth.join(" "));
    }
    Ok(())
}
