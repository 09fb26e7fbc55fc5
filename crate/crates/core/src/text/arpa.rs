//! ARPA text format for [`NGramModel`].
//!
//! Metadata travels in `#` comment lines ahead of `\data\`, which ARPA
//! readers ignore. Numbers are written with the shortest representation
//! that parses back to the same `f64`, so a round trip is exact.

use std::collections::HashMap;
use std::fmt::Write;

use super::ngram::{Entry, NGramModel, UNK};
use crate::error::FormatError;

impl NGramModel {
    pub fn to_arpa(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# polykey n-gram model");
        let _ = writeln!(out, "# language: {}", self.language_tag);
        let _ = writeln!(out, "# script: {}", self.script);
        let _ = writeln!(out, "# training-tokens: {}", self.training_tokens);
        out.push_str("\n\\data\\\n");
        for (k, layer) in self.grams.iter().enumerate() {
            let _ = writeln!(out, "ngram {}={}", k + 1, layer.len());
        }
        for (k, layer) in self.grams.iter().enumerate() {
            let _ = write!(out, "\n\\{}-grams:\n", k + 1);
            let mut rows: Vec<(&Vec<u32>, &Entry)> = layer.iter().collect();
            rows.sort_by(|a, b| a.0.cmp(b.0));
            for (gram, e) in rows {
                let words: Vec<&str> = gram.iter().map(|&i| self.word(i)).collect();
                let _ = write!(out, "{}\t{}", e.log_prob, words.join(" "));
                if e.log_bow != 0.0 {
                    let _ = write!(out, "\t{}", e.log_bow);
                }
                out.push('\n');
            }
        }
        out.push_str("\n\\end\\\n");
        out
    }

    pub fn from_arpa(text: &str) -> Result<Self, FormatError> {
        let lines: Vec<&str> = text.lines().collect();
        let mut meta: HashMap<&str, &str> = HashMap::new();
        let mut i = 0;
        while i < lines.len() && lines[i].trim() != "\\data\\" {
            if let Some((k, v)) = lines[i].trim_start_matches('#').split_once(':') {
                if lines[i].starts_with('#') {
                    meta.insert(k.trim(), v.trim());
                }
            }
            i += 1;
        }
        if i == lines.len() {
            return Err(FormatError::new(i + 1, "missing \\data\\ section"));
        }
        i += 1;
        let mut declared: Vec<usize> = Vec::new();
        while i < lines.len() {
            let line = lines[i].trim();
            if line.is_empty() {
                i += 1;
                continue;
            }
            let Some(spec) = line.strip_prefix("ngram ") else {
                break;
            };
            let (k, n) = spec
                .split_once('=')
                .ok_or_else(|| FormatError::new(i + 1, "expected ngram k=count"))?;
            let k: usize = k.trim().parse().map_err(|_| FormatError::new(i + 1, "bad order"))?;
            let n: usize = n.trim().parse().map_err(|_| FormatError::new(i + 1, "bad count"))?;
            if k != declared.len() + 1 {
                return Err(FormatError::new(i + 1, format!("expected ngram {}", declared.len() + 1)));
            }
            declared.push(n);
            i += 1;
        }
        if declared.is_empty() {
            return Err(FormatError::new(i + 1, "no ngram counts declared"));
        }
        if declared.len() > super::ngram::MAX_ORDER {
            return Err(FormatError::new(i, format!("order {} too large", declared.len())));
        }
        let order = declared.len();
        let mut vocab: Vec<String> = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut grams: Vec<HashMap<Vec<u32>, Entry>> = vec![HashMap::new(); order];
        for (k0, &count) in declared.iter().enumerate() {
            let k = k0 + 1;
            while i < lines.len() && lines[i].trim().is_empty() {
                i += 1;
            }
            if i == lines.len() {
                return Err(FormatError::new(i + 1, format!("unexpected end of file, expected \\{k}-grams:")));
            }
            if lines[i].trim() != format!("\\{k}-grams:") {
                return Err(FormatError::new(i + 1, format!("expected \\{k}-grams:")));
            }
            i += 1;
            for _ in 0..count {
                if i == lines.len() {
                    return Err(FormatError::new(i + 1, format!("unexpected end of file in {k}-grams")));
                }
                let lineno = i + 1;
                let fields: Vec<&str> = lines[i].split_whitespace().collect();
                i += 1;
                if fields.len() != k + 1 && fields.len() != k + 2 {
                    return Err(FormatError::new(lineno, format!("expected {k}-gram entry")));
                }
                let log_prob = parse_num(fields[0], lineno)?;
                if log_prob > 0.0 {
                    return Err(FormatError::new(lineno, format!("probability 10^{log_prob} exceeds 1")));
                }
                let log_bow = match fields.get(k + 1) {
                    Some(f) => parse_num(f, lineno)?,
                    None => 0.0,
                };
                let mut gram = Vec::with_capacity(k);
                for w in &fields[1..=k] {
                    let id = match index.get(*w) {
                        Some(&id) => id,
                        None if k == 1 => {
                            vocab.push(w.to_string());
                            index.insert(w.to_string(), vocab.len() as u32 - 1);
                            vocab.len() as u32 - 1
                        }
                        None => return Err(FormatError::new(lineno, format!("{w:?} is not a unigram"))),
                    };
                    gram.push(id);
                }
                if grams[k0].insert(gram, Entry { log_prob, log_bow }).is_some() {
                    return Err(FormatError::new(lineno, "duplicate n-gram"));
                }
            }
        }
        while i < lines.len() && lines[i].trim().is_empty() {
            i += 1;
        }
        if i == lines.len() {
            return Err(FormatError::new(i + 1, "unexpected end of file, expected \\end\\"));
        }
        if lines[i].trim() != "\\end\\" {
            return Err(FormatError::new(i + 1, "expected \\end\\"));
        }
        if !index.contains_key(UNK) {
            return Err(FormatError::new(i + 1, "vocabulary lacks <unk>"));
        }
        let training_tokens = match meta.get("training-tokens") {
            Some(v) => v
                .parse()
                .map_err(|_| FormatError::new(1, "bad training-tokens header"))?,
            None => 0,
        };
        Ok(Self {
            order,
            vocab,
            index,
            grams,
            training_tokens,
            language_tag: meta.get("language").unwrap_or(&"").to_string(),
            script: meta.get("script").unwrap_or(&"").to_string(),
        })
    }
}

fn parse_num(field: &str, line: usize) -> Result<f64, FormatError> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(FormatError::new(line, format!("bad number {field:?}"))),
    }
}
