//! Input loading and jet-context inference.

use std::path::Path;

use redmod_core::jet::JetContext;
use redmod_core::vfmod::ModuleSpec;
use redmod_core::{Error, Result, SymbolDecl};

/// Reads `arg` as a file when such a path exists, otherwise uses it verbatim.
pub fn text_or_file(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if !arg.contains('\n') && p.is_file() {
        let s = std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("cannot read {arg}: {e}")))?;
        Ok(s.trim().to_string())
    } else {
        Ok(arg.trim().to_string())
    }
}

pub fn json_or_file(arg: &str) -> Result<serde_json::Value> {
    let s = text_or_file(arg)?;
    serde_json::from_str(&s).map_err(|e| Error::InvalidInput(format!("invalid JSON: {e}")))
}

pub fn module_spec(arg: &str) -> Result<ModuleSpec> {
    serde_json::from_value(json_or_file(arg)?).map_err(|e| Error::InvalidInput(format!("invalid module: {e}")))
}

#[derive(Default)]
struct Scan {
    time: bool,
    jet_len: Option<usize>,
    max_x: Option<usize>,
    bare_x: bool,
}

fn scan(text: &str, out: &mut Scan) {
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            let id = &text[start..i];
            match id {
                "t" => out.time = true,
                "x" => out.bare_x = true,
                "u" if i < b.len() && b[i] == b'[' => {
                    let end = text[i..].find(']').map(|k| i + k).unwrap_or(b.len());
                    out.jet_len.get_or_insert(text[i + 1..end].split(',').count());
                }
                _ => {
                    if let Some(k) = id.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                        out.max_x = Some(out.max_x.map_or(k, |m| m.max(k)));
                    }
                }
            }
        } else {
            i += 1;
        }
    }
}

/// Options shaping the context.
pub struct ContextOptions<'a> {
    pub context: Option<&'a str>,
    pub n: Option<usize>,
    pub time: bool,
    pub symbols: &'a [String],
    pub nonzero: &'a [String],
    pub positive: &'a [String],
    pub r: Option<usize>,
    pub max_nodes: Option<usize>,
}

/// Builds the context from `--context`, or infers `n` and the time alias
/// from the input texts and an optional module file.
pub fn build(opts: &ContextOptions, texts: &[&str], module: Option<&ModuleSpec>) -> Result<JetContext> {
    let mut ctx = match opts.context {
        Some(c) => serde_json::from_value::<JetContext>(json_or_file(c)?)
            .map_err(|e| Error::InvalidInput(format!("invalid context: {e}")))?,
        None => {
            let mut s = Scan::default();
            for t in texts {
                scan(t, &mut s);
            }
            let time = opts.time || s.time || module.is_some_and(|m| m.time_alias);
            let n = opts
                .n
                .or(s.jet_len)
                .or(module.map(|m| m.n))
                .unwrap_or_else(|| {
                    let k = s.max_x.unwrap_or(usize::from(s.bare_x));
                    if time {
                        k.max(1) + 1
                    } else {
                        k.max(1)
                    }
                });
            if n == 0 || n > redmod_core::expr::MAX_VARS {
                return Err(Error::InvalidInput(format!("cannot use n = {n}")));
            }
            let mut c = JetContext::new(n);
            c.time_alias = time;
            if let Some(m) = module {
                c.symbols = m.symbols.clone();
            }
            c
        }
    };
    for s in opts.symbols {
        ctx = ctx.symbol_decl(SymbolDecl::new(s));
    }
    for s in opts.nonzero {
        ctx = ctx.symbol_decl(SymbolDecl::nonzero(s));
    }
    for s in opts.positive {
        ctx = ctx.symbol_decl(SymbolDecl::positive(s));
    }
    if let Some(r) = opts.r {
        ctx.r = r;
    }
    if let Some(m) = opts.max_nodes {
        ctx.max_nodes = m;
    }
    ctx.validate()?;
    Ok(ctx)
}
