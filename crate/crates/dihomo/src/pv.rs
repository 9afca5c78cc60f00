//! PV lock-program front end.
//!
//! Programs are declared in a small line-oriented text format:
//!
//! ```text
//! # a comment
//! sem a 1
//! proc P1: P(a) V(a)
//! proc P2: P(a); V(a)
//! ```
//!
//! `sem NAME K` declares a counting semaphore of capacity `K >= 1` (capacity 1
//! is a mutex). `proc NAME: op*` declares a sequential process as a list of
//! `P(lock)` / `V(lock)` operations, separated by whitespace or semicolons.
//! Declarations may appear in any order; process declaration order fixes the
//! coordinate order of every downstream analysis.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

/// A single lock operation. Locks are referenced by declaration index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// `P(lock)`: take one unit of the semaphore.
    Acquire(usize),
    /// `V(lock)`: give one unit back.
    Release(usize),
}

impl Instruction {
    pub fn lock(&self) -> usize {
        match *self {
            Instruction::Acquire(l) | Instruction::Release(l) => l,
        }
    }

    pub fn is_acquire(&self) -> bool {
        matches!(self, Instruction::Acquire(_))
    }
}

/// A declared semaphore.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semaphore {
    pub name: String,
    pub capacity: u32,
}

/// A sequential process: a name and its instruction sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub name: String,
    pub instructions: Vec<Instruction>,
}

/// A validated lock program.
///
/// Invariants enforced at construction:
/// * every referenced lock is declared and has capacity >= 1;
/// * within each process, every release matches exactly one earlier
///   unreleased acquire of the same lock;
/// * no process re-acquires a lock it currently holds;
/// * every acquire is released before its process ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    semaphores: Vec<Semaphore>,
    processes: Vec<Process>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PvError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}, column {col}: lock `{name}` is not declared")]
    UndeclaredLock { line: usize, col: usize, name: String },
    #[error("line {line}: semaphore `{name}` must have capacity at least 1")]
    BadCapacity { line: usize, name: String },
    #[error("line {line}: duplicate semaphore `{name}`")]
    DuplicateSemaphore { line: usize, name: String },
    #[error("line {line}: duplicate process `{name}`")]
    DuplicateProcess { line: usize, name: String },
    #[error("process {process}, instruction {position}: release of `{lock}` without a matching acquire")]
    UnmatchedRelease { process: usize, position: usize, lock: String },
    #[error("process {process}, instruction {position}: `{lock}` acquired while already held")]
    ReentrantAcquire { process: usize, position: usize, lock: String },
    #[error("process {process}: `{lock}` still held at end of process")]
    UnreleasedLock { process: usize, lock: String },
    #[error("process {process}, instruction {position}: lock index {index} out of range")]
    UnknownLockIndex { process: usize, position: usize, index: usize },
}

impl Program {
    /// Builds and validates a program from parts. Processes and semaphores
    /// keep the given order; that order is the coordinate order everywhere.
    pub fn new(
        semaphores: Vec<(String, u32)>,
        processes: Vec<(String, Vec<Instruction>)>,
    ) -> Result<Program, PvError> {
        let semaphores: Vec<Semaphore> = semaphores
            .into_iter()
            .map(|(name, capacity)| Semaphore { name, capacity })
            .collect();
        for (i, s) in semaphores.iter().enumerate() {
            if s.capacity < 1 {
                return Err(PvError::BadCapacity { line: 0, name: s.name.clone() });
            }
            if semaphores[..i].iter().any(|t| t.name == s.name) {
                return Err(PvError::DuplicateSemaphore { line: 0, name: s.name.clone() });
            }
        }
        let processes: Vec<Process> = processes
            .into_iter()
            .map(|(name, instructions)| Process { name, instructions })
            .collect();
        for (i, p) in processes.iter().enumerate() {
            if processes[..i].iter().any(|q| q.name == p.name) {
                return Err(PvError::DuplicateProcess { line: 0, name: p.name.clone() });
            }
        }
        let program = Program { semaphores, processes };
        program.validate()?;
        Ok(program)
    }

    fn validate(&self) -> Result<(), PvError> {
        for (pi, proc) in self.processes.iter().enumerate() {
            // held[l] = true while an acquire of l is pending its release
            let mut held = vec![false; self.semaphores.len()];
            for (k, instr) in proc.instructions.iter().enumerate() {
                let l = instr.lock();
                if l >= self.semaphores.len() {
                    return Err(PvError::UnknownLockIndex {
                        process: pi + 1,
                        position: k + 1,
                        index: l,
                    });
                }
                let name = || self.semaphores[l].name.clone();
                match instr {
                    Instruction::Acquire(_) => {
                        if held[l] {
                            return Err(PvError::ReentrantAcquire {
                                process: pi + 1,
                                position: k + 1,
                                lock: name(),
                            });
                        }
                        held[l] = true;
                    }
                    Instruction::Release(_) => {
                        if !held[l] {
                            return Err(PvError::UnmatchedRelease {
                                process: pi + 1,
                                position: k + 1,
                                lock: name(),
                            });
                        }
                        held[l] = false;
                    }
                }
            }
            if let Some(l) = held.iter().position(|&h| h) {
                return Err(PvError::UnreleasedLock {
                    process: pi + 1,
                    lock: self.semaphores[l].name.clone(),
                });
            }
        }
        Ok(())
    }

    /// Parses the PV text format.
    pub fn parse(source: &str) -> Result<Program, PvError> {
        // First pass: semaphore declarations, so locks may be declared after use.
        let mut semaphores: Vec<Semaphore> = Vec::new();
        for (li, raw) in source.lines().enumerate() {
            let line_no = li + 1;
            let line = strip_comment(raw);
            let mut words = line.split_whitespace();
            match words.next() {
                Some("sem") => {
                    let name = words.next().ok_or_else(|| PvError::Syntax {
                        line: line_no,
                        col: line.len() + 1,
                        message: "expected semaphore name after `sem`".into(),
                    })?;
                    check_name(name, line_no, 1)?;
                    let cap_tok = words.next().ok_or_else(|| PvError::Syntax {
                        line: line_no,
                        col: line.len() + 1,
                        message: "expected capacity after semaphore name".into(),
                    })?;
                    let capacity: i64 = cap_tok.parse().map_err(|_| PvError::Syntax {
                        line: line_no,
                        col: 1,
                        message: format!("capacity `{cap_tok}` is not an integer"),
                    })?;
                    if capacity < 1 {
                        return Err(PvError::BadCapacity { line: line_no, name: name.into() });
                    }
                    if let Some(extra) = words.next() {
                        return Err(PvError::Syntax {
                            line: line_no,
                            col: 1,
                            message: format!("unexpected token `{extra}` after capacity"),
                        });
                    }
                    if semaphores.iter().any(|s| s.name == name) {
                        return Err(PvError::DuplicateSemaphore { line: line_no, name: name.into() });
                    }
                    semaphores.push(Semaphore { name: name.into(), capacity: capacity as u32 });
                }
                Some("proc") | None => {}
                Some(other) => {
                    return Err(PvError::Syntax {
                        line: line_no,
                        col: 1,
                        message: format!("expected `sem` or `proc`, found `{other}`"),
                    });
                }
            }
        }

        // Second pass: process bodies.
        let mut processes: Vec<Process> = Vec::new();
        for (li, raw) in source.lines().enumerate() {
            let line_no = li + 1;
            let line = strip_comment(raw);
            let trimmed = line.trim_start();
            if !trimmed.starts_with("proc") {
                continue;
            }
            let after = &trimmed["proc".len()..];
            if !after.starts_with(char::is_whitespace) && !after.starts_with(':') && !after.is_empty() {
                // something like "process" misparsed as proc; first pass already rejected it
                continue;
            }
            let colon = line.find(':').ok_or_else(|| PvError::Syntax {
                line: line_no,
                col: line.len() + 1,
                message: "expected `:` after process name".into(),
            })?;
            let name_part = line[..colon].trim_start();
            let name = name_part["proc".len()..].trim();
            check_name(name, line_no, 1)?;
            if processes.iter().any(|p| p.name == name) {
                return Err(PvError::DuplicateProcess { line: line_no, name: name.into() });
            }
            let body = &line[colon + 1..];
            let instructions = parse_ops(body, colon + 1, line_no, &semaphores)?;
            processes.push(Process { name: name.into(), instructions });
        }

        let program = Program { semaphores, processes };
        program.validate_located(source)?;
        Ok(program)
    }

    /// Re-runs validation but maps failures back to source lines.
    fn validate_located(&self, source: &str) -> Result<(), PvError> {
        match self.validate() {
            Ok(()) => Ok(()),
            Err(e) => {
                // The process/position form is already precise; the proc line
                // is recoverable from the rendered name if a caller wants it.
                let _ = source;
                Err(e)
            }
        }
    }

    /// Canonical text form; `Program::parse` inverts it.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.semaphores {
            out.push_str(&format!("sem {} {}\n", s.name, s.capacity));
        }
        for p in &self.processes {
            out.push_str(&format!("proc {}:", p.name));
            for instr in &p.instructions {
                let (tag, lock) = match instr {
                    Instruction::Acquire(l) => ("P", *l),
                    Instruction::Release(l) => ("V", *l),
                };
                out.push_str(&format!(" {tag}({})", self.semaphores[lock].name));
            }
            out.push('\n');
        }
        out
    }

    pub fn semaphores(&self) -> &[Semaphore] {
        &self.semaphores
    }

    pub fn processes(&self) -> &[Process] {
        &self.processes
    }

    pub fn lock_index(&self, name: &str) -> Option<usize> {
        self.semaphores.iter().position(|s| s.name == name)
    }

    /// Instruction counts per process; these are the axis extents of the
    /// induced state space.
    pub fn instruction_counts(&self) -> Vec<u32> {
        self.processes.iter().map(|p| p.instructions.len() as u32).collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_name(name: &str, line: usize, col: usize) -> Result<(), PvError> {
    if is_name(name) {
        Ok(())
    } else {
        Err(PvError::Syntax { line, col, message: format!("invalid name `{name}`") })
    }
}

/// Scans a process body: `P(name)` / `V(name)` separated by blanks or `;`.
fn parse_ops(
    body: &str,
    col_offset: usize,
    line: usize,
    semaphores: &[Semaphore],
) -> Result<Vec<Instruction>, PvError> {
    let bytes = body.as_bytes();
    let mut ops = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() || c == ';' {
            i += 1;
            continue;
        }
        let col = col_offset + i + 1;
        let acquire = match c {
            'P' => true,
            'V' => false,
            _ => {
                return Err(PvError::Syntax {
                    line,
                    col,
                    message: format!("expected `P(` or `V(`, found `{c}`"),
                })
            }
        };
        i += 1;
        if i >= bytes.len() || bytes[i] != b'(' {
            return Err(PvError::Syntax { line, col, message: "expected `(` after operation".into() });
        }
        i += 1;
        let start = i;
        while i < bytes.len() && bytes[i] != b')' {
            i += 1;
        }
        if i >= bytes.len() {
            return Err(PvError::Syntax { line, col, message: "unterminated operation, expected `)`".into() });
        }
        let name = &body[start..i];
        i += 1;
        if !is_name(name) {
            return Err(PvError::Syntax { line, col, message: format!("invalid lock name `{name}`") });
        }
        let lock = semaphores.iter().position(|s| s.name == name).ok_or_else(|| {
            PvError::UndeclaredLock { line, col, name: name.into() }
        })?;
        ops.push(if acquire { Instruction::Acquire(lock) } else { Instruction::Release(lock) });
    }
    Ok(ops)
}

/// Per-process two-phase flags plus their conjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPhase {
    pub per_process: Vec<bool>,
    pub overall: bool,
}

/// A process is two-phase when every acquire precedes every release;
/// the program is two-phase when all its processes are.
pub fn is_two_phase(p: &Program) -> TwoPhase {
    let per_process: Vec<bool> = p
        .processes()
        .iter()
        .map(|proc| {
            let last_acquire = proc.instructions.iter().rposition(|i| i.is_acquire());
            let first_release = proc.instructions.iter().position(|i| !i.is_acquire());
            match (last_acquire, first_release) {
                (Some(a), Some(r)) => a < r,
                _ => true,
            }
        })
        .collect();
    let overall = per_process.iter().all(|&b| b);
    TwoPhase { per_process, overall }
}

/// Generates a two-phase program, deterministically in `seed`.
///
/// Each process acquires a random subset of the locks (at most
/// `max_locks_per_proc` of them) in one random order and releases them in an
/// independent random order, so every acquire precedes every release. All
/// semaphores get capacity 1.
pub fn generate_random_2pl(
    seed: u64,
    nprocs: usize,
    nlocks: usize,
    max_locks_per_proc: usize,
) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let semaphores: Vec<(String, u32)> = (0..nlocks).map(|i| (lock_name(i), 1)).collect();
    let mut processes = Vec::with_capacity(nprocs);
    for pi in 0..nprocs {
        let k = rng.gen_range(0..=max_locks_per_proc.min(nlocks));
        let mut pool: Vec<usize> = (0..nlocks).collect();
        pool.shuffle(&mut rng);
        let chosen = &pool[..k];
        let mut acquire_order = chosen.to_vec();
        acquire_order.shuffle(&mut rng);
        let mut release_order = chosen.to_vec();
        release_order.shuffle(&mut rng);
        let mut instructions: Vec<Instruction> =
            acquire_order.into_iter().map(Instruction::Acquire).collect();
        instructions.extend(release_order.into_iter().map(Instruction::Release));
        processes.push((format!("P{}", pi + 1), instructions));
    }
    Program::new(semaphores, processes).expect("generated program is valid by construction")
}

fn lock_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("l{}", i + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_process_mutex() {
        let p = Program::parse("sem a 1\nproc P: P(a) V(a)\nproc Q: P(a) V(a)\n").unwrap();
        assert_eq!(p.processes().len(), 2);
        assert_eq!(p.instruction_counts(), vec![2, 2]);
        assert_eq!(p.semaphores()[0].capacity, 1);
    }

    #[test]
    fn release_before_acquire_rejected() {
        let err = Program::parse("sem a 1\nproc P: V(a) P(a)\n").unwrap_err();
        assert!(matches!(err, PvError::UnmatchedRelease { process: 1, position: 1, .. }));
    }

    #[test]
    fn undeclared_lock_rejected() {
        let err = Program::parse("proc P: P(a) V(a)\n").unwrap_err();
        assert!(matches!(err, PvError::UndeclaredLock { ref name, .. } if name == "a"));
    }

    #[test]
    fn reentrant_acquire_rejected() {
        let err = Program::parse("sem a 1\nproc P: P(a) P(a) V(a) V(a)\n").unwrap_err();
        assert!(matches!(err, PvError::ReentrantAcquire { position: 2, .. }));
    }

    #[test]
    fn unreleased_lock_rejected() {
        let err = Program::parse("sem a 1\nproc P: P(a)\n").unwrap_err();
        assert!(matches!(err, PvError::UnreleasedLock { .. }));
    }

    #[test]
    fn capacity_zero_rejected() {
        let err = Program::parse("sem a 0\nproc P:\n").unwrap_err();
        assert!(matches!(err, PvError::BadCapacity { .. }));
    }

    #[test]
    fn semicolons_comments_and_late_declarations_accepted() {
        let p = Program::parse("# header\nproc P: P(a); V(a)  # inline\n\nsem a 2\n").unwrap();
        assert_eq!(p.semaphores()[0].capacity, 2);
        assert_eq!(p.processes()[0].instructions.len(), 2);
    }

    #[test]
    fn two_phase_examples() {
        let yes = Program::parse(
            "sem a 1\nsem b 1\nproc P1: P(a) P(b) V(a) V(b)\nproc P2: P(b) P(a) V(b) V(a)\n",
        )
        .unwrap();
        assert!(is_two_phase(&yes).overall);

        let no = Program::parse("sem a 1\nsem b 1\nproc P: P(a) V(a) P(b) V(b)\n").unwrap();
        let tp = is_two_phase(&no);
        assert_eq!(tp.per_process, vec![false]);
        assert!(!tp.overall);

        let empty = Program::parse("sem a 1\nproc P:\n").unwrap();
        assert!(is_two_phase(&empty).overall);
    }

    #[test]
    fn generator_is_two_phase_and_deterministic() {
        let a = generate_random_2pl(0, 2, 2, 2);
        let b = generate_random_2pl(0, 2, 2, 2);
        assert_eq!(a, b);
        assert!(is_two_phase(&a).overall);

        let single = generate_random_2pl(7, 1, 3, 3);
        assert_eq!(single.processes().len(), 1);

        let empty = generate_random_2pl(3, 2, 2, 0);
        assert!(empty.processes().iter().all(|p| p.instructions.is_empty()));
    }

    #[test]
    fn generated_acquires_precede_releases() {
        for seed in 0..50 {
            let p = generate_random_2pl(seed, 3, 3, 3);
            for proc in p.processes() {
                let last_acq = proc.instructions.iter().rposition(|i| i.is_acquire());
                let first_rel = proc.instructions.iter().position(|i| !i.is_acquire());
                if let (Some(a), Some(r)) = (last_acq, first_rel) {
                    assert!(a < r);
                }
            }
        }
    }

    #[test]
    fn render_parse_round_trip() {
        for seed in 0..30 {
            let p = generate_random_2pl(seed, 1 + (seed as usize % 3), 1 + (seed as usize % 4), seed as usize % 4);
            let back = Program::parse(&p.render()).unwrap();
            assert_eq!(p, back);
        }
    }
}
