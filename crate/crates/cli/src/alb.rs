//! Reader and writer for the plain-text `.alb` instance format.
//!
//! Layout: line 1 holds the task count T, the next T lines hold integer
//! task times, then one `a,b` precedence pair per line until the `-1,-1`
//! terminator, and the following line holds the cycle time. Anything after
//! the cycle time is ignored, which keeps files with extra trailing
//! sections readable.

use std::fmt::Write as _;

use swarmline_core::balancing::find_cycle;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AlbError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("precedence graph contains a cycle: {}", .cycle.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" -> "))]
    Cycle { cycle: Vec<usize> },
}

/// A parsed single-model instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AlbFile {
    pub num_tasks: usize,
    pub task_times: Vec<u64>,
    pub precedence: Vec<(usize, usize)>,
    pub cycle_time: f64,
}

fn parse_error(line: usize, message: impl Into<String>) -> AlbError {
    AlbError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_alb(text: &str) -> Result<AlbFile, AlbError> {
    // Line numbers are 1-based and count every line, including blanks.
    let end_line = text.lines().count() + 1;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut next_content =
        |what: &str| -> Result<(usize, &str), AlbError> {
            lines
                .find(|(_, l)| !l.is_empty())
                .ok_or_else(|| parse_error(end_line, format!("unexpected end of file: {what}")))
        };

    let (line_no, first) = next_content("missing task count")?;
    let num_tasks: usize = first
        .parse()
        .map_err(|_| parse_error(line_no, format!("invalid task count '{first}'")))?;
    if num_tasks == 0 {
        return Err(parse_error(line_no, "task count must be positive"));
    }

    let mut task_times = Vec::with_capacity(num_tasks);
    for _ in 0..num_tasks {
        let (line_no, raw) = next_content("missing task time")?;
        let time: u64 = raw
            .parse()
            .map_err(|_| parse_error(line_no, format!("invalid task time '{raw}'")))?;
        task_times.push(time);
    }

    let mut precedence = Vec::new();
    let cycle_line = loop {
        let (line_no, raw) = next_content("missing precedence terminator '-1,-1'")?;
        if let Some((a, b)) = raw.split_once(',') {
            let a = a.trim();
            let b = b.trim();
            if a == "-1" && b == "-1" {
                break next_content("missing cycle time after terminator")?;
            }
            let pred: usize = a
                .parse()
                .map_err(|_| parse_error(line_no, format!("invalid predecessor '{a}'")))?;
            let succ: usize = b
                .parse()
                .map_err(|_| parse_error(line_no, format!("invalid successor '{b}'")))?;
            let valid = (1..=num_tasks).contains(&pred) && (1..=num_tasks).contains(&succ);
            if !valid {
                return Err(parse_error(
                    line_no,
                    format!("pair ({pred},{succ}) references a task outside 1..={num_tasks}"),
                ));
            }
            precedence.push((pred, succ));
        } else {
            return Err(parse_error(
                line_no,
                format!("expected 'a,b' precedence pair or '-1,-1', got '{raw}'"),
            ));
        }
    };
    let (line_no, raw) = cycle_line;
    let cycle_time: f64 = raw
        .parse()
        .map_err(|_| parse_error(line_no, format!("invalid cycle time '{raw}'")))?;

    if let Some(cycle) = find_cycle(num_tasks, &precedence) {
        return Err(AlbError::Cycle { cycle });
    }
    Ok(AlbFile {
        num_tasks,
        task_times,
        precedence,
        cycle_time,
    })
}

/// Inverse of [`parse_alb`] on valid files.
pub fn serialize_alb(file: &AlbFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", file.num_tasks);
    for time in &file.task_times {
        let _ = writeln!(out, "{time}");
    }
    for (pred, succ) in &file.precedence {
        let _ = writeln!(out, "{pred},{succ}");
    }
    let _ = writeln!(out, "-1,-1");
    let _ = writeln!(out, "{}", file.cycle_time);
    out
}
