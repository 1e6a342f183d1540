//! End-to-end flows across modules.

use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fqdioph::approx::{badness_constant, dirichlet_witness, LinearFormSystem, SearchBudget};
use fqdioph::dimension::digit_map;
use fqdioph::game::{
    limit_point, play, BlackBranch, BlackRandom, FormalBall, GameParams, GameTranscript, ShrinkInPlace, StopRule,
};
use fqdioph::white_strategy::lemmas::{calibrate, CalibrationRequest};
use fqdioph::white_strategy::{certify_bad, BlackGreedy, Mode, StrategyConfig, WhiteStrategy};
use fqdioph::{FieldSpec, LaurentSeries, Magnitude};

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

#[test]
fn greedy_game_survives_serialization_and_certifies() {
    let s = FieldSpec::prime(2).unwrap();
    let params = GameParams::new(rat(1, 4), rat(1, 2), 2).unwrap();
    let cfg = StrategyConfig::new(1, 1, 2, 2).unwrap();
    let mut white = WhiteStrategy::new(cfg.clone());
    let mut black = BlackGreedy::new(cfg.clone());
    let t = play(&mut white, &mut black, FormalBall::unit(&s, 1, 1), &params, &StopRule::rounds(16)).unwrap();
    assert!(t.forfeit().is_none());
    assert_eq!(GameTranscript::from_jsonl(&t.to_jsonl()).unwrap(), t);

    let precision = -t.last().effective_exponent() - 1;
    let point = limit_point(&t, precision).unwrap();
    let cert = certify_bad(&point, &cfg, Magnitude::Pow(3)).unwrap();
    assert!(cert.min_margin_exponent > 0);
}

#[test]
fn branch_labels_give_distinct_points() {
    let s = FieldSpec::prime(2).unwrap();
    // β = 1/4 leaves Black exactly one free binding digit per move.
    let params = GameParams::new(rat(1, 2), rat(1, 4), 2).unwrap();
    let mut points = BTreeSet::new();
    let mut codes = BTreeSet::new();
    for word in 0..64u64 {
        let labels: Vec<u64> = (0..6).map(|i| (word >> i) & 1).collect();
        let t = play(
            &mut ShrinkInPlace,
            &mut BlackBranch::new(labels.clone()),
            FormalBall::unit(&s, 1, 1),
            &params,
            &StopRule::rounds(6),
        )
        .unwrap();
        assert!(t.forfeit().is_none());
        let precision = -t.last().effective_exponent() - 1;
        let x = limit_point(&t, precision).unwrap();
        let digits: Vec<_> = x.get(0, 0).terms_down_to(-precision).unwrap();
        points.insert(format!("{digits:?}"));
        codes.insert(digit_map(&t, &labels, 2).unwrap());
    }
    assert_eq!(points.len(), 64);
    assert_eq!(codes.len(), 64);
}

#[test]
fn calibrated_literal_player_stays_legal() {
    let s = FieldSpec::prime(2).unwrap();
    let cal = calibrate(&CalibrationRequest {
        spec: s.clone(),
        m: 1,
        n: 1,
        sigma: Magnitude::ONE,
        alpha: rat(1, 4),
        beta: rat(1, 2),
        samples: 200,
        seed: 4,
    })
    .unwrap();
    let cfg = StrategyConfig::new(1, 1, 2, 2).unwrap().with_calibration(&cal).with_mode(Mode::Literal);
    assert!(cfg.provenance.contains("200 samples"));
    let params = GameParams::new(rat(1, 4), rat(1, 2), 2).unwrap();
    for seed in 0..5 {
        let mut white = WhiteStrategy::new(cfg.clone());
        let t =
            play(&mut white, &mut BlackRandom::new(seed), FormalBall::unit(&s, 1, 1), &params, &StopRule::rounds(10))
                .unwrap();
        assert!(t.forfeit().is_none(), "seed {seed}");
    }
}

#[test]
fn dirichlet_caps_every_badness_constant() {
    // A witness at height k^t with ⟨qx⟩ <= k^{-t-1} forces K̂(x, k^t) <= k^-1.
    let s = FieldSpec::prime(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let x = LaurentSeries::random_exact(&s, &mut rng, -1, -16);
        let sys = LinearFormSystem::single(x);
        for t in 1..=4 {
            let w = dirichlet_witness(&sys, t).unwrap();
            let (kh, _) = badness_constant(&sys, Magnitude::Pow(t as i64), SearchBudget::default()).unwrap();
            assert!(kh <= w.score && kh <= Magnitude::Pow(-1));
        }
    }
}
