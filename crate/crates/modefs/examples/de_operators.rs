//! The classical differential-evolution operators on a toy population:
//! all five mutation strategies, binomial crossover, and scalar-fitness
//! selection.
//!
//!     cargo run --release --example de_operators

use modefs::evo::{
    classic_select, crossover, decode, encode, mutate, Individual, MutationStrategy, Population,
};
use modefs::seed::sub_rng;
use modefs::ObjectivePair;
use rand::Rng;

fn main() {
    let mut rng = sub_rng(42, &[1]);
    let d = 6;

    let members: Vec<Individual> = (0..8)
        .map(|i| {
            let pos: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
            let mut ind = Individual::from_position(pos, 0.6);
            ind.set_objectives(ObjectivePair::new(0.1 * i as f64, 1.0 - 0.1 * i as f64));
            ind
        })
        .collect();
    let pop = Population::new(members);

    println!("mutant vectors for slot 0 (F = 0.5):");
    for strategy in [
        MutationStrategy::Rand1,
        MutationStrategy::Rand2,
        MutationStrategy::Best1,
        MutationStrategy::Best2,
        MutationStrategy::CurrentToBest1,
    ] {
        let v = mutate(strategy, &pop, 0, 0.5, &mut rng).expect("mutation failed");
        let pretty: Vec<String> = v.iter().map(|x| format!("{x:.3}")).collect();
        println!("  {strategy:<18} [{}]", pretty.join(", "));
    }

    let x = pop.members[0].position.clone();
    let v = mutate(MutationStrategy::Rand1, &pop, 0, 0.5, &mut rng).unwrap();
    let u = crossover(&x, &v, 0.5, &mut rng);
    println!("\ncrossover (cr = 0.5):");
    println!(
        "  parent {:?}",
        x.iter()
            .map(|p| (p * 1e3).round() / 1e3)
            .collect::<Vec<_>>()
    );
    println!(
        "  mutant {:?}",
        v.iter()
            .map(|p| (p * 1e3).round() / 1e3)
            .collect::<Vec<_>>()
    );
    println!(
        "  trial  {:?}",
        u.iter()
            .map(|p| (p * 1e3).round() / 1e3)
            .collect::<Vec<_>>()
    );

    let mut trial = Individual::from_position(u, 0.6);
    trial.set_objectives(ObjectivePair::new(0.25, 0.3));
    let winner = classic_select(&pop.members[0], &trial, |o| o.fr + o.er).unwrap();
    println!(
        "\nscalar selection (fr + er): {} wins",
        if std::ptr::eq(winner, &trial) {
            "trial"
        } else {
            "incumbent"
        }
    );

    let mask = decode(&trial.position, 0.6);
    let rebuilt = encode(&mask, 0.6, &mut rng);
    println!(
        "\ndecode/encode round trip: {:?} -> {:?}",
        mask,
        decode(&rebuilt, 0.6)
    );
}
