//! The automata toolkit on its own: boolean operations, minimization and
//! transducer images.

use delplan::automata::{complement_within, determinize, union, Alphabet, Dfa, Nfa, Transducer};

fn main() -> delplan::Result<()> {
    let al = Alphabet::new(["x", "y"])?;
    let (x, y) = (al.letter("x").unwrap(), al.letter("y").unwrap());

    // words ending in x
    let mut n = Nfa::new(al.clone(), 2);
    n.add_initial(0);
    n.set_accepting(1, true);
    n.add_transition(0, x, 0);
    n.add_transition(0, y, 0);
    n.add_transition(0, x, 1);
    let ends_x = determinize(&n, 1000)?.minimize();

    // words of even length
    let mut even = Dfa::new(al.clone());
    let odd = even.add_state(false);
    even.set_accepting(0, true);
    for l in [x, y] {
        even.set_transition(0, l, odd);
        even.set_transition(odd, l, 0);
    }

    let either = union(&ends_x, &even)?.minimize();
    let neither = complement_within(&either, &Dfa::universal(al.clone()))?.minimize();
    println!(
        "ends in x: {} states, even: {} states",
        ends_x.num_states(),
        even.num_states()
    );
    println!(
        "union: {} states, complement: {} states",
        either.num_states(),
        neither.num_states()
    );
    let (words, _) = neither.enumerate(3, 10);
    let shown: Vec<String> = words.iter().map(|w| al.render(w)).collect();
    println!("shortest words in neither: {shown:?}");

    // swap x and y letter by letter
    let swap = Transducer::one_state(al.clone(), [(x, y), (y, x)]);
    let img: Vec<String> = swap
        .image(&[x, x, y])
        .iter()
        .map(|w| al.render(w))
        .collect();
    println!("swap(x x y) = {img:?}");
    print!("{}", ends_x.to_dot("ends_x"));
    Ok(())
}
