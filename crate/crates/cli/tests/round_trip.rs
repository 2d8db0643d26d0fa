use cech::cech::Cochain;
use cech::fixtures::{random_cocycle, random_sequence};
use cech_cli::commands;
use cech_cli::report::Report;
use cech_cli::scene::{Scene, SceneBuilder, SceneDocument};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_scene(seed: u64) -> (SceneDocument, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = random_sequence(&mut rng, 4);
    let nerve = seq.nerve().clone();
    let p = nerve.dimension().unwrap_or(0).saturating_sub(1);
    let c: Cochain = random_cocycle(&mut rng, &seq.quotient, p);
    let mut b = SceneBuilder::new(&nerve);
    b.sequence("s", ["L", "M", "N", "i", "pi"], &seq).cochain("c", "N", &c);
    (b.finish(), p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exported_scenes_round_trip(seed in any::<u64>()) {
        let (doc, _) = random_scene(seed);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: SceneDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
        prop_assert_eq!(back.digest(), doc.digest());
        prop_assert!(Scene::load(back).is_ok());
    }

    #[test]
    fn reports_round_trip(seed in any::<u64>()) {
        let (doc, p) = random_scene(seed);
        let scene = Scene::load(doc).unwrap();
        let reports = [
            commands::validate(&scene).unwrap(),
            commands::cohomology(&scene, "M", p, None).unwrap(),
            commands::connect(&scene, "s", "c", None).unwrap(),
        ];
        for report in reports {
            let text = report.render();
            let back: Report = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.render(), text);
            prop_assert_eq!(report.exit_code(), 0);
        }
    }
}
