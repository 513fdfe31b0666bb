//! Parsing, printing and normalizing epistemic formulas.

use delplan::formula::{parse_formula, parse_goal, Signature};

fn main() -> delplan::Result<()> {
    let sig = Signature::new(["a", "b"], ["p", "q"])?;
    for text in [
        "K[a] p -> q",
        "~(p | q) & K[b] ~K[a] p",
        "K[a](p -> K[b] q)",
    ] {
        let f = parse_formula(text, &sig)?;
        println!(
            "{text:28} => {f:28} depth {} size {}",
            f.nesting_depth(),
            f.size()
        );
        println!("{:28}    normalized {}", "", f.normalize());
    }
    let g = parse_goal("AF K[a] p", &sig)?;
    println!("goal {g}: head {:?}, body {}", g.head, g.body);
    match parse_formula("K[c] p", &sig) {
        Err(e) => println!("rejected: {e}"),
        Ok(f) => println!("unexpected: {f}"),
    }
    Ok(())
}
