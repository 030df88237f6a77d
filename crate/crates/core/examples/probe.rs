use twistcal_core::grid::GridSpec;
use twistcal_core::scenarios;
use twistcal_core::twist::{route_agreement, NumericOptions};

fn main() {
    for name in [
        "exp_associative",
        "holograph_sl_harmonic",
        "exp_cayley",
        "graph_coassociative",
        "paraboloid_conormal_sl",
        "borisenko_exact",
    ] {
        let sc = scenarios::get(name).unwrap();
        let fibres = sc.fibre_samples[..2.min(sc.fibre_samples.len())].to_vec();
        let angle_at = |step: f64, rich: bool| {
            route_agreement(
                &sc.spec,
                &GridSpec {
                    min: sc.base_grid.min.iter().map(|x| x + 0.02).collect(),
                    max: sc.base_grid.max.iter().map(|x| x - 0.03).collect(),
                    resolution: vec![3, 3],
                },
                &fibres,
                NumericOptions { step, richardson: rich },
            )
            .unwrap()
        };
        let e3 = angle_at(1e-3, false);
        let e4 = angle_at(1e-4, false);
        let e5 = angle_at(1e-5, false);
        println!(
            "{name:28} e3 {e3:.3e} e4 {e4:.3e} e5 {e5:.3e}  order(4,5) {:.3} order(3,4) {:.3}",
            (e4 / e5).log10(),
            (e3 / e4).log10()
        );
    }
}
