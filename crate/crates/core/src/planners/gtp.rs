//! Go Text Protocol (v2) client over a child process's standard streams.

use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use thiserror::Error;

use crate::games::{GoBoard, GoMove, MAX_BOARD_SIZE, MIN_BOARD_SIZE};

pub const DEFAULT_GTP_TIMEOUT: Duration = Duration::from_secs(10);

const COLUMNS: &[u8] = b"ABCDEFGHJKLMNOPQRST";

#[derive(Debug, Error)]
pub enum GtpError {
    #[error("failed to start engine: {0}")]
    Spawn(std::io::Error),
    #[error("engine i/o failed: {0}")]
    Io(std::io::Error),
    #[error("engine exited")]
    Exited,
    #[error("no response within {0:?}")]
    Timeout(Duration),
    #[error("malformed response: {0:?}")]
    Malformed(String),
    #[error("engine error: {0}")]
    Engine(String),
    #[error("session unusable after an earlier transport error")]
    Broken,
    #[error(transparent)]
    Vertex(#[from] VertexError),
}

impl GtpError {
    /// Transport failures, as opposed to `?` responses from a live engine.
    pub fn is_transport(&self) -> bool {
        !matches!(self, GtpError::Engine(_) | GtpError::Vertex(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VertexError {
    #[error("unparseable vertex {0:?}")]
    Syntax(String),
    #[error("vertex {text:?} is off a {size}x{size} board")]
    OutOfRange { text: String, size: usize },
    #[error("unsupported board size {0}")]
    BoardSize(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    /// Column and row, both from 0; row 0 is GTP row 1.
    Point(usize, usize),
    Pass,
}

impl Vertex {
    pub fn to_move(self, size: usize) -> GoMove {
        match self {
            Vertex::Point(c, r) => GoMove::Play(r * size + c),
            Vertex::Pass => GoMove::Pass,
        }
    }

    pub fn from_move(mv: GoMove, size: usize) -> Vertex {
        match mv {
            GoMove::Play(p) => Vertex::Point(p % size, p / size),
            GoMove::Pass => Vertex::Pass,
        }
    }
}

fn check_size(size: usize) -> Result<(), VertexError> {
    if (MIN_BOARD_SIZE..=MAX_BOARD_SIZE).contains(&size) {
        Ok(())
    } else {
        Err(VertexError::BoardSize(size))
    }
}

pub fn parse_vertex(text: &str, size: usize) -> Result<Vertex, VertexError> {
    check_size(size)?;
    let t = text.trim();
    if t.eq_ignore_ascii_case("pass") {
        return Ok(Vertex::Pass);
    }
    let syntax = || VertexError::Syntax(text.to_string());
    let mut chars = t.chars();
    let letter = chars.next().ok_or_else(syntax)?.to_ascii_uppercase();
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax());
    }
    let col = COLUMNS.iter().position(|&c| c as char == letter).ok_or_else(syntax)?;
    let row: usize = digits.parse().map_err(|_| syntax())?;
    if col >= size || row == 0 || row > size {
        return Err(VertexError::OutOfRange { text: text.to_string(), size });
    }
    Ok(Vertex::Point(col, row - 1))
}

pub fn format_vertex(col: usize, row: usize, size: usize) -> Result<String, VertexError> {
    check_size(size)?;
    if col >= size || row >= size {
        return Err(VertexError::OutOfRange { text: format!("({col},{row})"), size });
    }
    Ok(format!("{}{}", COLUMNS[col] as char, row + 1))
}

pub fn format_move(mv: GoMove, size: usize) -> Result<String, VertexError> {
    match Vertex::from_move(mv, size) {
        Vertex::Point(c, r) => format_vertex(c, r, size),
        Vertex::Pass => Ok("pass".to_string()),
    }
}

/// One GTP engine connection. Commands are strictly sequential.
pub struct GtpSession {
    writer: Box<dyn Write + Send>,
    lines: Receiver<std::io::Result<String>>,
    child: Option<Child>,
    next_id: u64,
    timeout: Duration,
    broken: bool,
}

impl GtpSession {
    /// Launches `engine_command` through `sh -c`.
    pub fn connect(engine_command: &str) -> Result<Self, GtpError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(format!("exec {engine_command}"))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(GtpError::Spawn)?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut session = Self::from_streams(stdout, stdin);
        session.child = Some(child);
        Ok(session)
    }

    /// Session over arbitrary streams; used for in-process engines and tests.
    pub fn from_streams(reader: impl Read + Send + 'static, writer: impl Write + Send + 'static) -> Self {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        Self {
            writer: Box::new(writer),
            lines: rx,
            child: None,
            next_id: 1,
            timeout: DEFAULT_GTP_TIMEOUT,
            broken: false,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn is_broken(&self) -> bool {
        self.broken
    }

    /// Sends one command and returns the response payload.
    pub fn send(&mut self, command: &str) -> Result<String, GtpError> {
        if self.broken {
            return Err(GtpError::Broken);
        }
        let result = self.exchange(command);
        if let Err(e) = &result {
            if e.is_transport() {
                self.broken = true;
            }
        }
        result
    }

    fn exchange(&mut self, command: &str) -> Result<String, GtpError> {
        let id = self.next_id;
        self.next_id += 1;
        let command = command.trim();
        if command.is_empty() || command.contains('\n') {
            return Err(GtpError::Malformed(format!("bad command {command:?}")));
        }
        writeln!(self.writer, "{id} {command}").map_err(GtpError::Io)?;
        self.writer.flush().map_err(GtpError::Io)?;

        let mut first = loop {
            let line = self.read_line()?;
            if !line.trim().is_empty() {
                break line;
            }
        };
        let mut body = Vec::new();
        loop {
            let line = self.read_line()?;
            if line.trim().is_empty() {
                break;
            }
            body.push(line);
        }

        let status = first.remove(0);
        if status != '=' && status != '?' {
            return Err(GtpError::Malformed(format!("{status}{first}")));
        }
        let rest = first.trim_start();
        let digits = rest.bytes().take_while(|b| b.is_ascii_digit()).count();
        if digits > 0 && rest[..digits].parse::<u64>().ok() != Some(id) {
            return Err(GtpError::Malformed(format!("response id {} for request {id}", &rest[..digits])));
        }
        let mut payload = rest[digits..].trim().to_string();
        for line in body {
            payload.push('\n');
            payload.push_str(line.trim_end());
        }
        if status == '?' {
            Err(GtpError::Engine(payload))
        } else {
            Ok(payload)
        }
    }

    fn read_line(&mut self) -> Result<String, GtpError> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(mut line)) => {
                if line.ends_with('\r') {
                    line.pop();
                }
                Ok(line)
            }
            Ok(Err(e)) => Err(GtpError::Io(e)),
            Err(RecvTimeoutError::Timeout) => Err(GtpError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(GtpError::Exited),
        }
    }

    /// Replays `board`'s history on a cleared engine board and asks for the
    /// next move of the side to move. Returns the engine's raw vertex text.
    pub fn genmove(&mut self, board: &GoBoard) -> Result<String, GtpError> {
        let n = board.size();
        self.send(&format!("boardsize {n}"))?;
        self.send("clear_board")?;
        self.send(&format!("komi {}", board.komi()))?;
        for &(color, mv) in board.moves() {
            self.send(&format!("play {} {}", color.gtp_name(), format_move(mv, n)?))?;
        }
        self.send(&format!("genmove {}", board.to_move().gtp_name()))
    }
}

impl Drop for GtpSession {
    fn drop(&mut self) {
        if let Some(mut child) = self.child.take() {
            if !self.broken {
                let _ = writeln!(self.writer, "quit");
                let _ = self.writer.flush();
            }
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// Engine command line for strength `level`: a `{level}` placeholder is
/// substituted, otherwise `--level <level>` is appended.
pub fn engine_command_with_level(command: &str, level: u32) -> String {
    if command.contains("{level}") {
        command.replace("{level}", &level.to_string())
    } else {
        format!("{command} --level {level}")
    }
}

pub fn gtp_connect(engine_command: &str) -> Result<GtpSession, GtpError> {
    GtpSession::connect(engine_command)
}

pub fn gtp_send(session: &mut GtpSession, command: &str) -> Result<String, GtpError> {
    session.send(command)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_examples() {
        assert_eq!(parse_vertex("A1", 7), Ok(Vertex::Point(0, 0)));
        assert_eq!(parse_vertex("pass", 7), Ok(Vertex::Pass));
        assert_eq!(parse_vertex("PASS", 7), Ok(Vertex::Pass));
        assert_eq!(parse_vertex("j9", 9), Ok(Vertex::Point(8, 8)));
        assert!(parse_vertex("I3", 9).is_err());
        assert!(parse_vertex("H8", 7).is_err());
        assert!(parse_vertex("A0", 7).is_err());
        assert!(parse_vertex("A", 7).is_err());
        assert_eq!(format_vertex(8, 8, 9).unwrap(), "J9");
    }

    #[test]
    fn level_placeholder() {
        assert_eq!(engine_command_with_level("gnugo --mode gtp", 10), "gnugo --mode gtp --level 10");
        assert_eq!(engine_command_with_level("eng -l {level} -q", 3), "eng -l 3 -q");
    }

    #[test]
    fn vertex_round_trip_all_sizes() {
        for size in MIN_BOARD_SIZE..=MAX_BOARD_SIZE {
            for col in 0..size {
                for row in 0..size {
                    let text = format_vertex(col, row, size).unwrap();
                    assert_eq!(parse_vertex(&text, size), Ok(Vertex::Point(col, row)));
                }
            }
        }
    }

    #[test]
    fn framing_over_streams() {
        let replies = "=1\n\n? 2 unknown command\n\n=3 C3\nmore\n\n";
        let mut s = GtpSession::from_streams(std::io::Cursor::new(replies.as_bytes().to_vec()), std::io::sink());
        assert_eq!(s.send("boardsize 7").unwrap(), "");
        assert!(matches!(s.send("bogus"), Err(GtpError::Engine(m)) if m == "unknown command"));
        assert_eq!(s.send("genmove black").unwrap(), "C3\nmore");
        assert!(matches!(s.send("genmove white"), Err(GtpError::Exited)));
        assert!(matches!(s.send("genmove white"), Err(GtpError::Broken)));
    }

    #[test]
    fn garbage_is_malformed() {
        let mut s = GtpSession::from_streams(std::io::Cursor::new(b"hello\n\n".to_vec()), std::io::sink());
        assert!(matches!(s.send("name"), Err(GtpError::Malformed(_))));
        assert!(s.is_broken());
    }
}
