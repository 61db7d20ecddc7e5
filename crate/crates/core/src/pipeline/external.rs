//! Line protocol for systems under learning that run as separate processes.
//!
//! The learner writes `RESET` or `STEP <input>`, one command per line; the
//! system answers `OK` or `OUT <output> <delay_seconds>` respectively.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use crate::automata::InputId;
use crate::error::{Error, Result};
use crate::mdm::SystemUnderLearning;

pub struct ExternalSul {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    inputs: Vec<String>,
    line: String,
}

impl ExternalSul {
    /// Starts `program args...` and talks to it over stdin/stdout.
    pub fn spawn(command: &[String], inputs: Vec<String>) -> Result<Self> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty SUL command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = BufReader::new(child.stdout.take().expect("piped"));
        Ok(Self {
            child,
            stdin,
            stdout,
            inputs,
            line: String::new(),
        })
    }

    fn exchange(&mut self, command: &str) -> Result<&str> {
        writeln!(self.stdin, "{command}")?;
        self.stdin.flush()?;
        self.line.clear();
        if self.stdout.read_line(&mut self.line)? == 0 {
            return Err(Error::Protocol(format!("SUL closed its output after `{command}`")));
        }
        Ok(self.line.trim_end())
    }
}

impl Drop for ExternalSul {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl SystemUnderLearning for ExternalSul {
    fn inputs(&self) -> Vec<String> {
        self.inputs.clone()
    }

    fn reset(&mut self) -> Result<()> {
        match self.exchange("RESET")? {
            "OK" => Ok(()),
            other => Err(Error::Protocol(format!("expected `OK`, got `{other}`"))),
        }
    }

    fn step(&mut self, input: InputId) -> Result<(String, f64)> {
        let name = self
            .inputs
            .get(input)
            .ok_or_else(|| Error::UnknownInput(format!("#{input}")))?
            .clone();
        let reply = self.exchange(&format!("STEP {name}"))?;
        parse_out(reply)
    }
}

fn parse_out(reply: &str) -> Result<(String, f64)> {
    let bad = || Error::Protocol(format!("expected `OUT <output> <delay>`, got `{reply}`"));
    let mut parts = reply.split_whitespace();
    if parts.next() != Some("OUT") {
        return Err(bad());
    }
    let out = parts.next().ok_or_else(bad)?.to_string();
    let delay: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if parts.next().is_some() || !delay.is_finite() || delay < 0.0 {
        return Err(bad());
    }
    Ok((out, delay))
}

/// Answers protocol commands from `reader` until end of input. Malformed
/// lines get an `ERR <message>` reply and are otherwise ignored.
pub fn serve<R: BufRead, W: Write>(sul: &mut dyn SystemUnderLearning, reader: R, mut writer: W) -> Result<()> {
    let inputs = sul.inputs();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let reply = if line == "RESET" {
            sul.reset().map(|_| "OK".to_string())
        } else if let Some(name) = line.strip_prefix("STEP ") {
            match inputs.iter().position(|i| i == name.trim()) {
                Some(i) => sul.step(i).map(|(o, d)| format!("OUT {o} {d}")),
                None => Err(Error::UnknownInput(name.trim().to_string())),
            }
        } else {
            Err(Error::Protocol(format!("unknown command `{line}`")))
        };
        match reply {
            Ok(r) => writeln!(writer, "{r}")?,
            Err(e) => writeln!(writer, "ERR {e}")?,
        }
        writer.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdm::{make_random_mdm, Simulator};
    use crate::models;

    #[test]
    fn serve_answers_commands() {
        let mdm = make_random_mdm(&models::m_prime(), 0, (2.0, 2.0));
        let mut sim = Simulator::new(mdm, 1);
        let input = "RESET\nSTEP a\nSTEP b\nJUMP\nSTEP z\nRESET\n";
        let mut out = Vec::new();
        serve(&mut sim, input.as_bytes(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "OK");
        let (o, d) = parse_out(lines[1]).unwrap();
        assert_eq!(o, "A");
        assert!(d >= 0.0);
        assert_eq!(parse_out(lines[2]).unwrap().0, "C");
        assert!(lines[3].starts_with("ERR"));
        assert!(lines[4].starts_with("ERR"));
        assert_eq!(lines[5], "OK");
    }

    #[test]
    fn malformed_replies() {
        for bad in ["OK", "OUT A", "OUT A x", "OUT A -1", "OUT A 1 2"] {
            assert!(matches!(parse_out(bad), Err(Error::Protocol(_))), "{bad}");
        }
        assert_eq!(parse_out("OUT A 0.5").unwrap(), ("A".to_string(), 0.5));
    }

    #[test]
    fn talks_to_a_child_process() {
        // A shell script that mimics a one-state SUL.
        let script = "while read line; do case \"$line\" in RESET) echo OK;; STEP*) echo OUT x 0.25;; esac; done";
        let cmd = vec!["sh".to_string(), "-c".to_string(), script.to_string()];
        let mut sul = ExternalSul::spawn(&cmd, vec!["a".into(), "b".into()]).unwrap();
        sul.reset().unwrap();
        assert_eq!(sul.step(1).unwrap(), ("x".to_string(), 0.25));
        assert!(sul.step(7).is_err());
    }
}
