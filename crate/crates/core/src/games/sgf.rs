use super::go::{tromp_taylor_score, Color, GoBoard, GoMove};

/// Minimal SGF record of a game: SZ, KM, the move list and, once the game
/// is over, RE from the Tromp-Taylor score.
pub fn to_sgf(board: &GoBoard) -> String {
    let n = board.size();
    let mut out = format!("(;GM[1]FF[4]SZ[{n}]KM[{}]", board.komi());
    if board.is_over() {
        let score = tromp_taylor_score(board, board.komi());
        let result = if score > 0.0 {
            format!("B+{score}")
        } else if score < 0.0 {
            format!("W+{}", -score)
        } else {
            "0".to_string()
        };
        out.push_str(&format!("RE[{result}]"));
    }
    for &(color, mv) in board.moves() {
        let tag = match color {
            Color::Black => 'B',
            Color::White => 'W',
        };
        let coord = match mv {
            GoMove::Pass => String::new(),
            GoMove::Play(p) => {
                let (col, row) = board.coords(p);
                // SGF rows count from the top edge.
                let top_row = n - 1 - row;
                format!("{}{}", (b'a' + col as u8) as char, (b'a' + top_row as u8) as char)
            }
        };
        out.push_str(&format!(";{tag}[{coord}]"));
    }
    out.push(')');
    out
}
