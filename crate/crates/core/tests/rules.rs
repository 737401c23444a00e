mod support;

use embodied::games::{go_apply, go_legal_moves, GoBoard, GoMove, Stone, TttBoard};
use proptest::prelude::*;

#[test]
fn tromp_taylor_matches_flood_fill_oracle() {
    let positions = support::random_go_positions(11, 200, 7);
    support::check_tromp_taylor(&positions).unwrap();
}

#[test]
fn tromp_taylor_other_sizes() {
    for size in [5, 9] {
        let positions = support::random_go_positions(size as u64, 50, size);
        support::check_tromp_taylor(&positions).unwrap();
    }
}

#[test]
fn legal_moves_match_trial_application() {
    let positions = support::random_go_positions(12, 150, 7);
    support::check_go_legal_moves(&positions).unwrap();
}

#[test]
fn minimax_never_loses() {
    support::check_ttt_minimax().unwrap();
}

#[test]
fn empty_board_score_is_minus_komi() {
    let b = GoBoard::new(7, 5.5);
    assert_eq!(embodied::games::tromp_taylor_score(&b, 5.5), -5.5);
}

proptest! {
    #[test]
    fn no_group_without_liberties(moves in proptest::collection::vec(0usize..50, 0..120)) {
        let mut b = GoBoard::new(7, 5.5);
        for m in moves {
            let mv = if m == 49 { GoMove::Pass } else { GoMove::Play(m) };
            if let Ok(next) = go_apply(&b, mv) {
                b = next;
            }
            if b.is_over() {
                break;
            }
            for p in 0..49 {
                if b.at(p) != Stone::Empty {
                    prop_assert!(b.liberties(p) > 0);
                }
            }
        }
    }

    #[test]
    fn legal_moves_apply_cleanly(moves in proptest::collection::vec(0usize..49, 0..60)) {
        let mut b = GoBoard::new(7, 5.5);
        for m in moves {
            if let Ok(next) = go_apply(&b, GoMove::Play(m)) {
                b = next;
            }
        }
        for mv in go_legal_moves(&b) {
            prop_assert!(go_apply(&b, mv).is_ok());
        }
    }

    #[test]
    fn ttt_moves_fill_one_cell(moves in proptest::collection::vec(0usize..9, 0..12)) {
        let mut b = TttBoard::new();
        for m in moves {
            let before = b.legal_moves().len();
            if let Ok(next) = b.apply(m) {
                prop_assert_eq!(next.cells.iter().filter(|c| **c == embodied::games::Mark::Empty).count() + 1,
                    b.cells.iter().filter(|c| **c == embodied::games::Mark::Empty).count());
                prop_assert!(next.legal_moves().len() < before || next.is_terminal());
                b = next;
            }
        }
    }
}
