//! `--config` expansion and value parsers for flags.

use std::ffi::OsString;
use std::fs;

use num_complex::Complex64;

/// `key=value` tokens of a config file, in file order. Tokens are separated by
/// whitespace (values may contain commas); `#` starts a comment.
pub fn read_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| format!("config: expected key=value, got `{tok}`"))?;
            out.push((k.trim().to_ascii_lowercase().replace('_', "-"), v.trim().to_string()));
        }
    }
    Ok(out)
}

/// Replaces `--config <path>` by the file's entries as `--key value` arguments
/// placed right after the subcommand, so explicit flags (which come later) win.
pub fn expand_config(args: Vec<OsString>, cmd: &clap::Command) -> Result<Vec<OsString>, String> {
    let mut args = args;
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_str().unwrap_or("");
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a path".into());
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(OsString::from(p));
            args.remove(i);
        } else if a == "--" {
            break;
        } else {
            i += 1;
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let entries = read_config(&text)?;
    let Some((pos, sub)) = args
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(j, a)| a.to_str().and_then(|s| cmd.find_subcommand(s)).map(|s| (j, s)))
    else {
        return Ok(args);
    };
    let mut injected = Vec::new();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| format!("config key `{key}` is not an option of `{}`", sub.get_name()))?;
        if arg.get_action().takes_values() {
            injected.push(OsString::from(format!("--{key}")));
            injected.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" | "1" | "yes" => injected.push(OsString::from(format!("--{key}"))),
                "false" | "0" | "no" => {}
                _ => return Err(format!("config key `{key}` is a switch; expected true or false, got `{value}`")),
            }
        }
    }
    args.splice(pos + 1..pos + 1, injected);
    Ok(args)
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not a finite number: `{s}`"))
    }
}

/// Complex numbers written as `a`, `bi`, `a+bi`, `a-bi` (`j` also accepted).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let err = || format!("not a complex number: `{s}` (expected e.g. -1+1i, 0.5i, 2)");
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return parse_f64(t).map(|x| Complex64::new(x, 0.0)).map_err(|_| err());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(Complex64::new(parse_f64(re).map_err(|_| err())?, parse_f64(im).map_err(|_| err())?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexList(pub Vec<Complex64>);

pub fn parse_complex_list(s: &str) -> Result<ComplexList, String> {
    let v = s.split(',').filter(|t| !t.trim().is_empty()).map(parse_complex).collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(ComplexList(v))
}

/// Sizes given as `a..b` or `a..=b` (both inclusive), or as a comma list.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeList(pub Vec<usize>);

pub fn parse_size_list(s: &str) -> Result<SizeList, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a non-negative integer: `{t}`"));
    let v = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range `{s}`"));
        }
        (a..=b).collect()
    } else {
        s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?
    };
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(SizeList(v))
}

/// One axis `lo:hi:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    /// `count` equispaced nodes including both ends.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| if self.count == 1 { self.lo } else { self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64 })
            .collect()
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(format!("axis `{s}` must be lo:hi:count"));
    };
    let count = count.trim().parse::<usize>().map_err(|_| format!("axis count `{count}` is not an integer"))?;
    if count == 0 {
        return Err(format!("axis `{s}` has no points"));
    }
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if hi < lo {
        return Err(format!("axis `{s}` runs backwards"));
    }
    Ok(Axis { lo, hi, count })
}

/// A rectangular grid `x0:x1:nx,y0:y1:ny`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x: Axis,
    pub y: Axis,
}

impl Grid {
    /// Row-major points, x fastest.
    pub fn points(&self) -> Vec<Complex64> {
        let xs = self.x.nodes();
        self.y.nodes().into_iter().flat_map(|y| xs.iter().map(move |&x| Complex64::new(x, y))).collect()
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("grid `{s}` must be x0:x1:nx,y0:y1:ny"))?;
    Ok(Grid { x: parse_axis(x)?, y: parse_axis(y)? })
}

/// `h:y:x0:x1:count` (horizontal) or `v:x:y0:y1:count` (vertical).
pub fn parse_line(s: &str) -> Result<pfkernel::converge::GridLine, String> {
    use pfkernel::converge::GridLine;
    let parts: Vec<&str> = s.split(':').collect();
    let [kind, at, a, b, count] = parts[..] else {
        return Err(format!("line `{s}` must be h:y:x0:x1:count or v:x:y0:y1:count"));
    };
    let count = count.trim().parse::<usize>().map_err(|_| format!("line count `{count}` is not an integer"))?;
    let (at, a, b) = (parse_f64(at)?, parse_f64(a)?, parse_f64(b)?);
    match kind {
        "h" => Ok(GridLine::Horizontal { y: at, x0: a, x1: b, count }),
        "v" => Ok(GridLine::Vertical { x: at, y0: a, y1: b, count }),
        _ => Err(format!("line kind `{kind}` must be h or v")),
    }
}
