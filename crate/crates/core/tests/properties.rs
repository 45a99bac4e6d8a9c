use footcorpus::curate::{approx_tokens, chunk_items, Provenance, QAPair};
use footcorpus::distill::parse_qa_tuples;
use footcorpus::fixture::{fixture_gen_with, FixtureOptions};
use footcorpus::lora::{dequantize8, forward, merge, quantize8, BaseMatrix, LoraAdapter};
use footcorpus::model::EventType;
use footcorpus::pitch_grid::{locate, COLS, ROWS};
use footcorpus::stats::{div_round_half_up, event_decomposition, standings};
use footcorpus::tables::build_tables;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn cell_by_boundaries(v: f64, cells: u8) -> u8 {
    (1..cells).filter(|&c| v >= f64::from(c) * 100.0 / f64::from(cells)).count() as u8
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn locate_is_half_open_and_total(x in 0.0f64..=100.0, y in 0.0f64..=100.0) {
        let r = locate(x, y).unwrap();
        prop_assert_eq!(r.col(), cell_by_boundaries(x, COLS));
        prop_assert_eq!(r.row(), cell_by_boundaries(y, ROWS));
    }

    #[test]
    fn locate_rejects_out_of_range(v in prop_oneof![-1e6f64..-1e-12, 100.000_001f64..1e6]) {
        prop_assert!(locate(v, 50.0).is_err());
        prop_assert!(locate(50.0, v).is_err());
    }

    #[test]
    fn half_up_rounding_bound(n in 0u64..1_000_000, d in 1u64..10_000) {
        let q = div_round_half_up(n, d);
        // q·d − n lies in (−d/2, d/2].
        let diff = 2 * i128::from(q) * i128::from(d) - 2 * i128::from(n);
        prop_assert!(diff > -i128::from(d) && diff <= i128::from(d), "n={} d={} q={}", n, d, q);
    }

    #[test]
    fn parse_qa_tuples_is_total(s in "\\PC{0,200}") {
        if let Ok(pairs) = parse_qa_tuples(&s) {
            for p in pairs {
                prop_assert!(p.question.starts_with("Question : footgpt, "));
                prop_assert!(p.answer.starts_with("Answer : "));
            }
        }
    }

    #[test]
    fn parse_qa_tuples_recovers_lists(
        items in prop::collection::vec(("[a-zA-Z ,()'\"]{1,20}[a-z]", "[a-zA-Z ,()'\"\\[\\]]{0,20}[a-z]"), 1..20),
        prose in "[a-z .:]{0,30}",
    ) {
        let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let body: Vec<String> = items.iter().map(|(q, a)| format!("({}, {})", quote(q), quote(a))).collect();
        let raw = format!("{prose}\n[{}]\n{prose}", body.join(", "));
        let got = parse_qa_tuples(&raw).unwrap();
        let want: Vec<QAPair> = items
            .iter()
            .filter_map(|(q, a)| QAPair::new(q, a, "teacher", Provenance::Teacher).ok())
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn quantization_error_is_half_a_step(
        rows in 1usize..8,
        cols in 1usize..8,
        seed in any::<u64>(),
        spread in -4i32..4,
    ) {
        let mut state = seed | 1;
        let m = DMatrix::from_fn(rows, cols, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 10f64.powi(spread)
        });
        let q = quantize8(&m).unwrap();
        let err = (dequantize8(&q) - &m).amax();
        prop_assert!(err <= q.scale / 2.0, "err {} scale {}", err, q.scale);
    }

    #[test]
    fn factored_forward_matches_merged(
        d in 2usize..7,
        k in 2usize..7,
        entries in prop::collection::vec(-2.0f64..2.0, 200),
    ) {
        let r = 1;
        let mut it = entries.into_iter().cycle();
        let w0 = DMatrix::from_fn(d, k, |_, _| it.next().unwrap());
        let b = DMatrix::from_fn(d, r, |_, _| it.next().unwrap());
        let a = DMatrix::from_fn(r, k, |_, _| it.next().unwrap());
        let x = DVector::from_fn(k, |_, _| it.next().unwrap());
        let base = BaseMatrix::new(w0).unwrap();
        let ad = LoraAdapter::new(b, a).unwrap();
        let f = forward(&base, &ad, &x).unwrap();
        let m = merge(&base, &ad).unwrap().matrix() * &x;
        prop_assert!((f - m).amax() <= 1e-10);
    }

    #[test]
    fn chunks_respect_budget_and_keep_lines(
        lines in prop::collection::vec("[a-z]{1,6}( [a-z]{1,6}){0,12}", 1..40),
        max in 20usize..80,
    ) {
        let chunks = chunk_items(&lines, max).unwrap();
        let rejoined: Vec<&str> = chunks.iter().flat_map(|c| c.text.split('\n')).collect();
        prop_assert_eq!(rejoined, lines.iter().map(String::as_str).collect::<Vec<_>>());
        for (i, c) in chunks.iter().enumerate() {
            prop_assert!(c.approx_tokens <= max);
            prop_assert_eq!(c.approx_tokens, approx_tokens(&c.text));
            prop_assert_eq!(c.seq_no, i);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn standings_conserve_points(seed in any::<u64>(), half in 1usize..5, gws in 1usize..6) {
        let n = 2 * half;
        let ds = fixture_gen_with(n, gws, seed, &FixtureOptions::sparse()).unwrap().parse().unwrap();
        let t = build_tables(&ds).unwrap();
        let mut last = vec![0u32; n];
        for gw in 1..=t.last_gameweek() {
            let rows = standings(&t, gw, true).unwrap();
            let played: Vec<_> = ds.matches.iter().filter(|m| m.gameweek <= gw).collect();
            let draws = played.iter().filter(|m| m.home_goals == m.away_goals).count() as u32;
            let decisive = played.len() as u32 - draws;
            prop_assert_eq!(rows.iter().map(|r| r.points_cum).sum::<u32>(), 3 * decisive + 2 * draws);
            let mut by_team: Vec<_> = rows.iter().map(|r| (r.team_id, r.points_cum)).collect();
            by_team.sort();
            for (i, (_, p)) in by_team.iter().enumerate() {
                prop_assert!(*p >= last[i]);
                last[i] = *p;
            }
            let ranks: Vec<u32> = rows.iter().map(|r| r.rank).collect();
            prop_assert_eq!(ranks, (1..=n as u32).collect::<Vec<_>>());
        }
    }

    #[test]
    fn decomposition_shares_are_consistent(seed in any::<u64>(), gw in 1u32..4, et in 0usize..11) {
        let ds = fixture_gen_with(4, 3, seed, &FixtureOptions::sparse()).unwrap().parse().unwrap();
        let t = build_tables(&ds).unwrap();
        let et = EventType::ALL[et];
        for team in &t.teams_info {
            let d = event_decomposition(&t, team.team_id, gw..=gw, et, false).unwrap();
            let raw: u64 = d.counts.iter().sum();
            prop_assert_eq!(d.total_count, raw);
            let independent = t
                .events
                .iter()
                .filter(|e| e.team_id == team.team_id && e.gameweek == gw && e.event_type == et)
                .count() as u64;
            prop_assert_eq!(raw, independent);
            prop_assert!(d.top5.len() <= 5);
            prop_assert!(d.top5.windows(2).all(|w| w[0].pct >= w[1].pct));
            let pct_sum: u32 = d.top5.iter().map(|s| s.pct).sum();
            // Each share is rounded by at most half a point.
            prop_assert!(pct_sum <= 102);
            for s in &d.top5 {
                let c = d.counts[s.region.index()];
                prop_assert!((200 * c).abs_diff(2 * u64::from(s.pct) * raw) <= raw);
            }
        }
    }
}
