//! Hypervolume and IGD on hand-built fronts, including the analytic cases
//! (single point 0.25, two slabs 0.48) and the effect of adding or
//! dominating points.
//!
//!     cargo run --release --example indicators

use modefs::{hypervolume, igd, ObjectivePair, ReferenceFront};

fn p(fr: f64, er: f64) -> ObjectivePair {
    ObjectivePair::new(fr, er)
}

fn main() {
    let reference_point = (1.0, 1.0);

    println!("hypervolume against reference point (1, 1):");
    println!(
        "  {{(0.5, 0.5)}}              -> {}",
        hypervolume(&[p(0.5, 0.5)], reference_point)
    );
    println!(
        "  {{(0.2, 0.6), (0.6, 0.2)}}  -> {}",
        hypervolume(&[p(0.2, 0.6), p(0.6, 0.2)], reference_point)
    );
    println!(
        "  ... plus dominated (0.7, 0.7) -> {} (unchanged)",
        hypervolume(&[p(0.2, 0.6), p(0.6, 0.2), p(0.7, 0.7)], reference_point)
    );
    println!(
        "  ... plus (0.1, 0.9)         -> {} (grows)",
        hypervolume(&[p(0.2, 0.6), p(0.6, 0.2), p(0.1, 0.9)], reference_point)
    );

    let reference = ReferenceFront::from_points(vec![p(0.1, 0.7), p(0.4, 0.4), p(0.7, 0.1)]);
    println!("\nigd against a 3-point reference front:");
    let exact: Vec<ObjectivePair> = reference.points().to_vec();
    println!(
        "  the reference itself -> {}",
        igd(&exact, &reference).unwrap()
    );
    println!(
        "  one middling point   -> {:.5}",
        igd(&[p(0.5, 0.5)], &reference).unwrap()
    );
    println!(
        "  shifted by +0.05     -> {:.5}",
        igd(&[p(0.15, 0.75), p(0.45, 0.45), p(0.75, 0.15)], &reference).unwrap()
    );
}
