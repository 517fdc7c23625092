//! Word permutations with prescribed letters: the merge step on a
//! three-letter alphabet, then a full build from a prescription table.
//!
//! ```bash
//! cargo run -p sat2span --example prescribed_permutations
//! ```

use sat2span::weave::{all_words, build_permutation, merge_permutations, Prescription, WordPermutation};

fn main() {
    // merge three identity permutations of 1-letter words, steering the
    // words that start with letter 1 through rho = (3, 1, 3)
    let subs = vec![WordPermutation::identity(3, 1); 3];
    let rho = [3, 1, 3];
    let merged = merge_permutations(&subs, &rho).unwrap();
    println!("merged permutation on 2-letter words over {{1,2,3}} with rho = {rho:?}:");
    for word in all_words(3, 2) {
        let image = merged.apply(&word);
        println!("  {:?} -> {:?}", word.letters(), image.letters());
    }

    // a prescription forces the output letter wherever the input letter is 1;
    // the remaining positions are completed into a bijection
    let prescription = Prescription::from_fn(2, 3, |word, position| {
        word.letters()[position - 1].eq(&1).then_some(if position % 2 == 0 { 2 } else { 1 })
    })
    .unwrap();
    let phi = build_permutation(&prescription);
    println!("\nbuilt permutation on 3-letter words over {{1,2}} (prescribed slots marked *):");
    for word in all_words(2, 3) {
        let image = phi.apply(&word);
        let marks: String = word
            .letters()
            .iter()
            .zip(image.letters())
            .map(|(&input, &output)| if input == 1 { format!("{output}*") } else { output.to_string() })
            .collect::<Vec<_>>()
            .join("");
        println!("  {:?} -> {marks}", word.letters());
        for i in 1..=3 {
            if word.letters()[i - 1] == 1 {
                assert_eq!(Some(image.letters()[i - 1]), prescription.get(word.rank(), i));
            }
        }
    }
    println!("\nevery starred letter matches its prescription; the map is a bijection");
}
