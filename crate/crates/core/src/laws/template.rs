use std::collections::HashMap;

/// What a `$name` hole is replaced by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    /// A term; inserted parenthesised.
    Term(String),
    /// A set of terms, only usable as a comprehension source.
    Set(Vec<String>),
    Nat(u32),
    /// An operator symbol, inserted bare.
    Op(&'static str),
}

pub type Env = HashMap<String, Slot>;

fn ident(s: &str) -> usize {
    s.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(s.len())
}

/// Index just past the `}` closing a `{` at position 0.
fn closing(s: &str) -> Result<usize, String> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i + 1);
                }
            }
            _ => {}
        }
    }
    Err(format!("unclosed comprehension in `{s}`"))
}

fn var<'a>(s: &'a str, what: &str) -> Result<&'a str, String> {
    s.trim()
        .strip_prefix('$')
        .filter(|v| !v.is_empty() && ident(v) == v.len())
        .ok_or_else(|| format!("expected {what} variable, found `{s}`"))
}

fn comprehension(inner: &str, env: &Env) -> Result<String, String> {
    let (header, body) = inner
        .split_once(':')
        .ok_or_else(|| format!("comprehension without `:` in `{inner}`"))?;
    let (x, source) = header
        .split_once(" in ")
        .ok_or_else(|| format!("comprehension without `in` in `{header}`"))?;
    let x = var(x, "bound")?;
    let items: Vec<Slot> = if let Some((lo, hi)) = source.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| format!("bad range start `{lo}`"))?;
        let hi = match env.get(var(hi, "bound")?) {
            Some(Slot::Nat(n)) => *n,
            _ => return Err(format!("range bound `{hi}` is not a natural")),
        };
        (lo..hi).map(Slot::Nat).collect()
    } else {
        match env.get(var(source, "set")?) {
            Some(Slot::Set(items)) => items.iter().cloned().map(Slot::Term).collect(),
            _ => return Err(format!("`{source}` is not a set")),
        }
    };
    if items.is_empty() {
        return Ok("magic".into());
    }
    let mut local = env.clone();
    let mut alts = Vec::with_capacity(items.len());
    for item in items {
        local.insert(x.to_string(), item);
        alts.push(format!("({})", render(body.trim(), &local)?));
    }
    Ok(format!("({})", alts.join(" + ")))
}

/// Fills the holes of a template.
pub fn render(template: &str, env: &Env) -> Result<String, String> {
    let mut out = String::with_capacity(template.len() * 2);
    let mut rest = template;
    while let Some(i) = rest.find(['$', '{']) {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        if rest.starts_with("{+") {
            let end = closing(rest)?;
            out.push_str(&comprehension(&rest[2..end - 1], env)?);
            rest = &rest[end..];
        } else if let Some(after) = rest.strip_prefix('$') {
            let n = ident(after);
            let name = &after[..n];
            match env.get(name) {
                Some(Slot::Term(t)) => {
                    out.push('(');
                    out.push_str(t);
                    out.push(')');
                }
                Some(Slot::Nat(k)) => out.push_str(&k.to_string()),
                Some(Slot::Op(op)) => out.push_str(op),
                Some(Slot::Set(_)) => return Err(format!("set `${name}` used as a term")),
                None => return Err(format!("unbound `${name}`")),
            }
            rest = &after[n..];
        } else {
            // a literal brace, as in `pgm{(0,1)}`
            let end = closing(rest)?;
            out.push_str(&rest[..end]);
            rest = &rest[end..];
        }
    }
    out.push_str(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, Slot)]) -> Env {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn holes_are_parenthesised() {
        let e = env(&[
            ("c0", Slot::Term("pi + eps".into())),
            ("c", Slot::Term("nil".into())),
            ("op", Slot::Op("&&")),
        ]);
        assert_eq!(render("$c0 $op $c", &e).unwrap(), "(pi + eps) && (nil)");
    }

    #[test]
    fn comprehensions() {
        let e = env(&[
            ("D", Slot::Set(vec!["pi".into(), "eps".into()])),
            ("C", Slot::Set(vec![])),
            ("c", Slot::Term("nil".into())),
            ("B", Slot::Nat(2)),
        ]);
        assert_eq!(
            render("$c ; {+ $x in $D : $c || $x}", &e).unwrap(),
            "(nil) ; (((nil) || (pi)) + ((nil) || (eps)))"
        );
        assert_eq!(render("{+ $x in $C : $x}", &e).unwrap(), "magic");
        assert_eq!(
            render("{+ $k in 0..$B : pow($c, $k)}", &e).unwrap(),
            "((pow((nil), 0)) + (pow((nil), 1)))"
        );
        assert_eq!(render("pgm{(0,1)} ; $c", &e).unwrap(), "pgm{(0,1)} ; (nil)");
    }

    #[test]
    fn unbound_hole_is_an_error() {
        assert!(render("$nope", &Env::new()).is_err());
    }
}
