//! `key=value` configuration files, spliced into the argument list so that
//! command-line flags take precedence.

use std::fs;
use std::path::Path;

/// Reads a config file into `--key=value` arguments. Blank lines and lines
/// starting with `#` are ignored; `key=true` becomes a bare `--key` and
/// `key=false` is dropped.
pub fn load(path: &Path) -> Result<Vec<String>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let (k, v) = (k.trim().trim_start_matches("--"), v.trim());
        if k.is_empty() || k == "config" {
            return Err(format!("config line {}: invalid key '{k}'", n + 1));
        }
        match v {
            "true" => args.push(format!("--{k}")),
            "false" => {}
            _ => args.push(format!("--{k}={v}")),
        }
    }
    Ok(args)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Inserts config arguments right after the subcommand, then repeats any
/// flags given before the subcommand, so every explicit flag comes last.
pub fn splice(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(pos) = args
        .iter()
        .skip(1)
        .position(|a| subcommands.contains(&a.as_str()))
    else {
        return Ok(args);
    };
    let pos = pos + 1;
    let extra = load(Path::new(&path))?;
    let mut out = args[..=pos].to_vec();
    out.extend(extra);
    out.extend(args[1..pos].iter().cloned());
    out.extend(args[pos + 1..].iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let args = parse("# comment\nb = 1.5\n\nmeta=true\nprofile=false\n--steps=3\n").unwrap();
        assert_eq!(args, ["--b=1.5", "--meta", "--steps=3"]);
        assert!(parse("novalue").is_err());
        assert!(parse("config=x").is_err());
    }

    #[test]
    fn finds_config_flag() {
        let v = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(
            config_path(&v(&["x", "--config", "a.cfg"])),
            Some("a.cfg".into())
        );
        assert_eq!(
            config_path(&v(&["x", "--config=b.cfg"])),
            Some("b.cfg".into())
        );
        assert_eq!(config_path(&v(&["x", "coeffs"])), None);
    }
}
