//! Finite presentations with peripheral subpresentations, and exact normal forms.

mod family;
mod word;

use thiserror::Error;

pub use family::{ElementKey, Family, FiniteTable, NormalFormProvider};
pub use word::{commutator, cyclically_reduce, free_reduce, same_cyclic_relator, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown generator `{name}` at {line}:{column}")]
    UnknownGenerator {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("peripheral {name} is not a subpresentation: {reason}")]
    NotSubpresentation { name: String, reason: String },
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("presentation does not match its group family: {0}")]
    FamilyMismatch(String),
    #[error("generator {0} is outside the provider alphabet")]
    LetterOutsideAlphabet(usize),
}

/// A designated peripheral subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeripheralSpec {
    pub name: String,
    pub generators: Vec<usize>,
    /// Indices into [`GroupPresentation::relators`].
    pub relators: Vec<usize>,
    pub provider: NormalFormProvider,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    pub peripherals: Vec<PeripheralSpec>,
    /// Word-problem service for the whole group.
    pub provider: NormalFormProvider,
}

impl GroupPresentation {
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn normal_form(&self, w: &Word) -> Result<Word, PresentationError> {
        self.provider.normal_form(w)
    }

    /// Membership of the element with normal form `nf` in peripheral `i`.
    pub fn in_peripheral(&self, i: usize, nf: &Word) -> bool {
        let gens = &self.peripherals[i].generators;
        nf.letters().iter().all(|l| gens.contains(&l.generator))
    }

    pub fn render_word(&self, w: &Word) -> String {
        w.render(&self.generators)
    }

    /// Parses a word such as `ab'a` (or `1` for the identity) over this presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word, PresentationError> {
        parse_word(text.trim(), &self.generators, 1, 1)
    }

    /// Text form accepted by [`parse_presentation`].
    pub fn to_text(&self) -> String {
        let mut s = format!("gens {}\n", self.generators.join(","));
        let rels: Vec<String> = self.relators.iter().map(|r| self.render_word(r)).collect();
        s.push_str(&format!("rels {}\n", rels.join(",")));
        s.push_str(&format!("group [{}]\n", family_syntax(&self.provider, &self.generators)));
        for p in &self.peripherals {
            let names: Vec<&str> = p.generators.iter().map(|&g| self.generators[g].as_str()).collect();
            s.push_str(&format!(
                "periph {}: {} [{}]\n",
                p.name,
                names.join(","),
                family_syntax(&p.provider, &self.generators)
            ));
        }
        s
    }
}

fn family_syntax(p: &NormalFormProvider, names: &[String]) -> String {
    match &p.family {
        Family::Free => "free".into(),
        Family::FreeAbelian => "free-abelian".into(),
        Family::Surface { genus } => format!("surface({genus})"),
        Family::Product(fs) => {
            let parts: Vec<String> = fs
                .iter()
                .map(|f| {
                    let gens: Vec<&str> = f.alphabet.iter().map(|&g| names[g].as_str()).collect();
                    format!("{}{{{}}}", family_syntax(f, names), gens.join(","))
                })
                .collect();
            format!("product({})", parts.join(" * "))
        }
        Family::Table { .. } => {
            let (rows, images) = p.table_parts();
            let rows: Vec<String> = rows
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            let imgs: Vec<String> = p
                .alphabet
                .iter()
                .zip(images)
                .map(|(&g, x)| format!("{}={}", names[g], x))
                .collect();
            format!("table({} | {})", rows.join("/"), imgs.join(" "))
        }
    }
}

impl NormalFormProvider {
    fn table_parts(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        match &self.family {
            Family::Table { table, images } => (table.rows(), images.clone()),
            _ => (Vec::new(), Vec::new()),
        }
    }
}

struct Stmt<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> PresentationError {
    PresentationError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits on newlines and on `;`, dropping comments and blank statements.
fn statements(text: &str) -> Vec<Stmt<'_>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut start = 0;
        for piece in line.split(';') {
            let lead = piece.len() - piece.trim_start().len();
            let t = piece.trim();
            if !t.is_empty() {
                out.push(Stmt {
                    text: t,
                    line: ln + 1,
                    column: start + lead + 1,
                });
            }
            start += piece.len() + 1;
        }
    }
    out
}

/// Splits on commas that are not inside brackets, with column offsets.
fn split_top_level(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' | '{' => depth += 1,
            ']' | ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

fn parse_word(text: &str, names: &[String], line: usize, column: usize) -> Result<Word, PresentationError> {
    let t = text.trim();
    if t.is_empty() || t == "1" {
        return Ok(Word::identity());
    }
    let bytes: Vec<char> = t.chars().collect();
    let mut i = 0;
    let mut out = Word::identity();
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '[' {
            let mut depth = 0;
            let mut j = i;
            while j < bytes.len() {
                match bytes[j] {
                    '[' => depth += 1,
                    ']' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                j += 1;
            }
            if j == bytes.len() {
                return Err(syntax(line, column + i, "unclosed `[`"));
            }
            let inner: String = bytes[i + 1..j].iter().collect();
            let parts = split_top_level(&inner);
            if parts.len() != 2 {
                return Err(syntax(line, column + i, "commutator needs exactly two entries"));
            }
            let x = parse_word(parts[0].1, names, line, column + i + 1 + parts[0].0)?;
            let y = parse_word(parts[1].1, names, line, column + i + 1 + parts[1].0)?;
            out = out.concat(&x).concat(&y).concat(&x.inverse()).concat(&y.inverse());
            i = j + 1;
            continue;
        }
        if !c.is_alphanumeric() && c != '_' {
            return Err(syntax(line, column + i, format!("unexpected character `{c}`")));
        }
        // Longest generator name matching here.
        let rest: String = bytes[i..].iter().collect();
        let best = names
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len());
        let Some((g, name)) = best else {
            let name: String = bytes[i..]
                .iter()
                .take_while(|c| c.is_alphanumeric() || **c == '_')
                .collect();
            return Err(PresentationError::UnknownGenerator {
                name,
                line,
                column: column + i,
            });
        };
        i += name.chars().count();
        let inverse = i < bytes.len() && bytes[i] == '\'';
        if inverse {
            i += 1;
        }
        out.push(Letter::new(g, inverse));
    }
    Ok(out)
}

fn parse_names(text: &str, line: usize, column: usize) -> Result<Vec<String>, PresentationError> {
    let mut out = Vec::new();
    for (off, part) in split_top_level(text) {
        let name = part.trim();
        let col = column + off + (part.len() - part.trim_start().len());
        if name.is_empty() {
            return Err(syntax(line, col, "empty generator name"));
        }
        if !name.chars().next().unwrap().is_alphabetic()
            || !name.chars().all(|c| c.is_alphanumeric() || c == '_')
        {
            return Err(syntax(line, col, format!("invalid generator name `{name}`")));
        }
        out.push(name.to_string());
    }
    Ok(out)
}

fn lookup(names: &[String], name: &str, line: usize, column: usize) -> Result<usize, PresentationError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| PresentationError::UnknownGenerator {
            name: name.to_string(),
            line,
            column,
        })
}

/// Parses a family tag over the given alphabet (global generator indices).
fn parse_family(
    tag: &str,
    alphabet: &[usize],
    names: &[String],
    line: usize,
    column: usize,
) -> Result<NormalFormProvider, PresentationError> {
    let tag = tag.trim();
    let inner = |prefix: &str| -> Option<&str> {
        tag.strip_prefix(prefix)
            .and_then(|r| r.trim_start().strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    let family = if tag == "free" {
        Family::Free
    } else if tag == "free-abelian" {
        Family::FreeAbelian
    } else if let Some(g) = inner("surface") {
        let genus = g
            .trim()
            .parse::<usize>()
            .map_err(|_| syntax(line, column, format!("bad surface genus `{g}`")))?;
        Family::Surface { genus }
    } else if let Some(body) = inner("product") {
        let mut factors = Vec::new();
        for part in body.split('*') {
            let part = part.trim();
            let open = part
                .rfind('{')
                .ok_or_else(|| syntax(line, column, "product factor needs `{generators}`"))?;
            let gens_text = part[open + 1..]
                .strip_suffix('}')
                .ok_or_else(|| syntax(line, column, "unclosed `{` in product factor"))?;
            let mut gens = Vec::new();
            for n in gens_text.split(',') {
                let g = lookup(names, n.trim(), line, column)?;
                if !alphabet.contains(&g) {
                    return Err(PresentationError::UnsupportedFamily(format!(
                        "product factor generator `{}` is not in scope",
                        n.trim()
                    )));
                }
                gens.push(g);
            }
            factors.push(parse_family(&part[..open], &gens, names, line, column)?);
        }
        Family::Product(factors)
    } else if let Some(body) = inner("table") {
        let (rows_text, imgs_text) = body
            .split_once('|')
            .ok_or_else(|| syntax(line, column, "table needs `rows | generator=element ...`"))?;
        let mut rows = Vec::new();
        for r in rows_text.split('/') {
            let row: Result<Vec<usize>, _> = r.split_whitespace().map(|x| x.parse::<usize>()).collect();
            rows.push(row.map_err(|_| syntax(line, column, "table entries must be integers"))?);
        }
        let table = FiniteTable::new(rows).map_err(PresentationError::UnsupportedFamily)?;
        let mut images = vec![usize::MAX; alphabet.len()];
        for item in imgs_text.split_whitespace() {
            let (n, x) = item
                .split_once('=')
                .ok_or_else(|| syntax(line, column, format!("bad table image `{item}`")))?;
            let g = lookup(names, n.trim(), line, column)?;
            let pos = alphabet.iter().position(|&a| a == g).ok_or_else(|| {
                PresentationError::UnsupportedFamily(format!("table image for out-of-scope generator `{n}`"))
            })?;
            images[pos] = x
                .parse()
                .map_err(|_| syntax(line, column, format!("bad table element `{x}`")))?;
        }
        if images.contains(&usize::MAX) {
            return Err(PresentationError::UnsupportedFamily(
                "table needs an image for every generator".into(),
            ));
        }
        Family::Table { table, images }
    } else {
        return Err(PresentationError::UnsupportedFamily(tag.to_string()));
    };
    NormalFormProvider::new(family, alphabet.to_vec())
}

/// Splits `body [tag]` into `(body, Some(tag))`.
fn split_family(text: &str) -> (&str, Option<(usize, &str)>) {
    match (text.find('['), text.ends_with(']')) {
        (Some(i), true) => (&text[..i], Some((i + 1, &text[i + 1..text.len() - 1]))),
        _ => (text, None),
    }
}

/// Checks that `rels` (all trivial) contain every defining relator of `p`.
fn check_relators(p: &NormalFormProvider, rels: &[&Word]) -> Result<(), String> {
    for r in rels {
        if !p.is_trivial(r).map_err(|e| e.to_string())? {
            return Err(format!("relator {r} is not trivial in the {} family", p.family.tag()));
        }
    }
    for d in p.defining_relators() {
        if !rels.iter().any(|r| same_cyclic_relator(r, &d)) {
            return Err(format!("defining relator {d} of the {} family is missing", p.family.tag()));
        }
    }
    Ok(())
}

/// Parses and validates a presentation file.
pub fn parse_presentation(text: &str) -> Result<GroupPresentation, PresentationError> {
    let stmts = statements(text);
    let mut names: Option<Vec<String>> = None;
    let mut rels_stmt: Option<&Stmt> = None;
    let mut group_stmt: Option<&Stmt> = None;
    let mut periph_stmts: Vec<&Stmt> = Vec::new();
    for s in &stmts {
        let (kw, rest) = s.text.split_once(char::is_whitespace).unwrap_or((s.text, ""));
        match kw {
            "gens" => {
                if names.is_some() {
                    return Err(syntax(s.line, s.column, "duplicate `gens` line"));
                }
                let off = s.text.len() - rest.len();
                let ns = parse_names(rest, s.line, s.column + off)?;
                for (i, n) in ns.iter().enumerate() {
                    if ns[..i].contains(n) {
                        return Err(syntax(s.line, s.column, format!("duplicate generator `{n}`")));
                    }
                }
                names = Some(ns);
            }
            "rels" => rels_stmt = Some(s),
            "group" => group_stmt = Some(s),
            "periph" => periph_stmts.push(s),
            _ => return Err(syntax(s.line, s.column, format!("unknown statement `{kw}`"))),
        }
    }
    let names = names.ok_or_else(|| syntax(1, 1, "missing `gens` line"))?;
    let mut relators = Vec::new();
    if let Some(s) = rels_stmt {
        let rest = s.text["rels".len()..].trim_start();
        let off = s.text.len() - rest.len();
        if !rest.trim().is_empty() {
            for (o, part) in split_top_level(rest) {
                if part.trim().is_empty() {
                    return Err(syntax(s.line, s.column + off + o, "empty relator"));
                }
                let lead = part.len() - part.trim_start().len();
                relators.push(parse_word(part, &names, s.line, s.column + off + o + lead)?);
            }
        }
    }
    let all: Vec<usize> = (0..names.len()).collect();
    let rel_refs: Vec<&Word> = relators.iter().collect();
    let provider = match group_stmt {
        Some(s) => {
            let rest = s.text["group".len()..].trim();
            let tag = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| syntax(s.line, s.column, "expected `group [family]`"))?;
            let p = parse_family(tag, &all, &names, s.line, s.column)?;
            check_relators(&p, &rel_refs).map_err(PresentationError::FamilyMismatch)?;
            p
        }
        None => {
            let free = NormalFormProvider::new(Family::Free, all.clone())?;
            let abelian = NormalFormProvider::new(Family::FreeAbelian, all.clone())?;
            if relators.iter().all(|r| free_reduce(r).is_empty()) {
                free
            } else if check_relators(&abelian, &rel_refs).is_ok() {
                abelian
            } else {
                return Err(PresentationError::FamilyMismatch(
                    "cannot infer the group family; add a `group [family]` line".into(),
                ));
            }
        }
    };
    let mut peripherals = Vec::new();
    for s in periph_stmts {
        let rest = s.text["periph".len()..].trim_start();
        let off = s.text.len() - rest.len();
        let (name, body) = rest
            .split_once(':')
            .ok_or_else(|| syntax(s.line, s.column + off, "expected `periph NAME: gens [family]`"))?;
        let name = name.trim().to_string();
        let (gens_text, fam) = split_family(body.trim());
        let (fam_off, tag) =
            fam.ok_or_else(|| syntax(s.line, s.column, format!("peripheral {name} needs a `[family]` tag")))?;
        let gcol = s.column + off + name.len() + 1;
        let mut gens = Vec::new();
        for (o, n) in split_top_level(gens_text) {
            let n = n.trim();
            if n.is_empty() {
                continue;
            }
            let g = lookup(&names, n, s.line, gcol + o)?;
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        if gens.is_empty() {
            return Err(syntax(s.line, s.column, format!("peripheral {name} has no generators")));
        }
        let p = parse_family(tag, &gens, &names, s.line, gcol + fam_off)?;
        let rel_idx: Vec<usize> = relators
            .iter()
            .enumerate()
            .filter(|(_, r)| r.letters().iter().all(|l| gens.contains(&l.generator)))
            .map(|(i, _)| i)
            .collect();
        let prels: Vec<&Word> = rel_idx.iter().map(|&i| &relators[i]).collect();
        check_relators(&p, &prels).map_err(|reason| PresentationError::NotSubpresentation {
            name: name.clone(),
            reason,
        })?;
        if peripherals.iter().any(|q: &PeripheralSpec| q.name == name) {
            return Err(syntax(s.line, s.column, format!("duplicate peripheral `{name}`")));
        }
        peripherals.push(PeripheralSpec {
            name,
            generators: gens,
            relators: rel_idx,
            provider: p,
        });
    }
    Ok(GroupPresentation {
        generators: names,
        relators,
        peripherals,
        provider,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_with_cyclic_peripheral() {
        let p = parse_presentation("gens a,b; rels ; periph P: a [free]").unwrap();
        assert_eq!(p.generators, vec!["a", "b"]);
        assert!(p.relators.is_empty());
        assert_eq!(p.peripherals.len(), 1);
        assert_eq!(p.peripherals[0].generators, vec![0]);
        assert_eq!(p.provider.family, Family::Free);
    }

    #[test]
    fn z2_with_itself_as_peripheral() {
        let p = parse_presentation("gens a,b; rels [a,b]; periph P: a,b [free-abelian]").unwrap();
        assert_eq!(p.relators, vec![Word::from_signed(&[1, 2, -1, -2])]);
        assert_eq!(p.provider.family, Family::FreeAbelian);
        assert_eq!(p.peripherals[0].relators, vec![0]);
    }

    #[test]
    fn unknown_generator_is_reported() {
        let e = parse_presentation("gens a,b\nrels abc'\n").unwrap_err();
        assert!(e.to_string().contains("unknown generator"), "{e}");
        assert!(matches!(e, PresentationError::UnknownGenerator { line: 2, column: 8, .. }));
    }

    #[test]
    fn juxtaposed_letters_and_comments() {
        let p = parse_presentation("# torus\ngens a,b\nrels aba'b'  # commutator\n").unwrap();
        assert_eq!(p.relators[0], commutator(Letter::gen(0), Letter::gen(1)));
    }

    #[test]
    fn peripheral_must_be_subpresentation() {
        let e = parse_presentation("gens a,b; rels ; periph P: a,b [free-abelian]").unwrap_err();
        assert!(matches!(e, PresentationError::NotSubpresentation { .. }), "{e}");
    }

    #[test]
    fn unsupported_tag() {
        let e = parse_presentation("gens a,b; rels ; periph P: a [nilpotent]").unwrap_err();
        assert!(matches!(e, PresentationError::UnsupportedFamily(_)), "{e}");
    }

    #[test]
    fn noninferable_group_needs_a_family_line() {
        assert!(parse_presentation("gens a,b; rels aab").is_err());
        let p = parse_presentation("gens a,b,c,d; rels [a,b][c,d]; group [surface(2)]").unwrap();
        assert_eq!(p.provider.family, Family::Surface { genus: 2 });
    }

    #[test]
    fn product_and_table_families_roundtrip() {
        let text = "gens a,b,c\nrels [a,b],[a,c],[b,c]\ngroup [product(free{a} * free-abelian{b,c})]\n";
        // [b,c] is a defining relator; [a,b],[a,c] are the product commutators.
        let p = parse_presentation(text).unwrap();
        let again = parse_presentation(&p.to_text()).unwrap();
        assert_eq!(p, again);

        let t = "gens a\nrels aaa\ngroup [table(0 1 2/1 2 0/2 0 1 | a=1)]\nperiph P: a [table(0 1 2/1 2 0/2 0 1 | a=1)]";
        let p = parse_presentation(t).unwrap();
        assert!(p.normal_form(&Word::from_signed(&[1, 1, 1])).unwrap().is_empty());
        assert_eq!(parse_presentation(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn membership_by_letters() {
        let p = parse_presentation("gens a,b; rels ; periph P: a [free]").unwrap();
        let nf = p.normal_form(&Word::from_signed(&[2, 1, -2])).unwrap();
        assert!(!p.in_peripheral(0, &nf));
        let nf = p.normal_form(&Word::from_signed(&[2, 1, -2, 2])).unwrap();
        assert!(!p.in_peripheral(0, &nf));
        let nf = p.normal_form(&Word::from_signed(&[2, -2, 1])).unwrap();
        assert!(p.in_peripheral(0, &nf));
    }
}
