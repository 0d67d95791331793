//! Model bundle files.
//!
//! A bundle is a pair `<name>.manifest` + `<name>.tensors`.
//!
//! The manifest is UTF-8 text: `key = value` header lines, a `[config]`
//! section, a `[tf_vocab <n>]` section with one term per line in index
//! order, and a `[tfidf_vocab <n>]` section with `term idf` per line, idf
//! written with 17 significant digits.
//!
//! The tensor file is little-endian: the magic bytes `STNC`, a `u32`
//! format version, `u64` input_dim, hidden_size and class count, then
//! W1, b1, W2, b2 as row-major `f64`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::config::TrainConfig;
use crate::error::{Error, Result};
use crate::label::StanceLabel;
use crate::model::ModelBundle;
use crate::nn::{MlpParams, NUM_CLASSES};
use crate::text::{feature_dim, FeatureExtractor, TfIdfModel, Vocabulary};

pub const FORMAT_VERSION: u32 = 1;
pub const MAGIC: &[u8; 4] = b"STNC";
pub const TENSOR_HEADER_BYTES: usize = 4 + 4 + 3 * 8;

/// `(<name>.manifest, <name>.tensors)`. A trailing `.manifest` or
/// `.tensors` on `path` is stripped first.
pub fn bundle_paths(path: impl AsRef<Path>) -> (PathBuf, PathBuf) {
    let path = path.as_ref();
    let base = match path.extension().and_then(|e| e.to_str()) {
        Some("manifest" | "tensors") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let with = |ext: &str| {
        let mut s: OsString = base.clone().into_os_string();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".manifest"), with(".tensors"))
}

fn labels_line() -> String {
    StanceLabel::ALL.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(",")
}

pub fn manifest_text(bundle: &ModelBundle) -> String {
    let p = &bundle.params;
    let tfidf = &bundle.features.tfidf;
    let mut s = String::new();
    let _ = writeln!(s, "# stance model manifest");
    let _ = writeln!(s, "format_version = {FORMAT_VERSION}");
    let _ = writeln!(s, "labels = {}", labels_line());
    let _ = writeln!(s, "input_dim = {}", p.input_dim());
    let _ = writeln!(s, "hidden_size = {}", p.hidden_size());
    let _ = writeln!(s, "num_classes = {NUM_CLASSES}");
    let _ = writeln!(s, "tfidf_doc_count = {}", tfidf.corpus_doc_count());
    let _ = writeln!(s, "\n[config]");
    s.push_str(&bundle.config.to_string());
    let _ = writeln!(s, "\n[tf_vocab {}]", bundle.features.tf_vocab.len());
    for t in bundle.features.tf_vocab.terms() {
        let _ = writeln!(s, "{t}");
    }
    let _ = writeln!(s, "\n[tfidf_vocab {}]", tfidf.vocab().len());
    for (t, w) in tfidf.vocab().terms().iter().zip(tfidf.idf()) {
        let _ = writeln!(s, "{t} {w:.16e}");
    }
    s
}

pub fn tensor_bytes(params: &MlpParams) -> Vec<u8> {
    let n: usize = params.tensors().iter().map(|t| t.len()).sum();
    let mut out = Vec::with_capacity(TENSOR_HEADER_BYTES + 8 * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for d in [params.input_dim(), params.hidden_size(), NUM_CLASSES] {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for t in params.tensors() {
        for v in t {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))?;
    f.sync_all().map_err(|e| Error::io(path, e))
}

pub fn save_model(bundle: &ModelBundle, path: impl AsRef<Path>) -> Result<()> {
    let (manifest, tensors) = bundle_paths(path);
    write_file(&manifest, manifest_text(bundle).as_bytes())?;
    write_file(&tensors, &tensor_bytes(&bundle.params))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelBundle> {
    let (manifest, tensors) = bundle_paths(path);
    let text = std::fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
    let bytes = std::fs::read(&tensors).map_err(|e| Error::io(&tensors, e))?;
    from_parts(&text, &bytes)
}

struct Manifest {
    version: u32,
    labels: String,
    input_dim: usize,
    hidden_size: usize,
    num_classes: usize,
    tfidf_doc_count: usize,
    config: TrainConfig,
    tf_terms: Vec<String>,
    tfidf_terms: Vec<String>,
    idf: Vec<f64>,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptManifest(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: Option<&str>) -> Result<T> {
    let v = v.ok_or_else(|| corrupt(format!("missing `{key}`")))?;
    v.trim().parse().map_err(|_| corrupt(format!("bad value for `{key}`: `{v}`")))
}

fn parse_manifest(text: &str) -> Result<Manifest> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Config,
        Tf(usize),
        TfIdf(usize),
    }
    let mut section = Section::Header;
    let mut header = std::collections::HashMap::new();
    let mut config_text = String::new();
    let (mut tf_terms, mut tfidf_terms, mut idf) = (Vec::new(), Vec::new(), Vec::new());
    let (mut tf_n, mut tfidf_n) = (None, None);

    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let mut parts = name.split_whitespace();
            section = match (parts.next(), parts.next()) {
                (Some("config"), None) => Section::Config,
                (Some("tf_vocab"), n) => {
                    let n = parse_num("tf_vocab size", n)?;
                    tf_n = Some(n);
                    Section::Tf(n)
                }
                (Some("tfidf_vocab"), n) => {
                    let n = parse_num("tfidf_vocab size", n)?;
                    tfidf_n = Some(n);
                    Section::TfIdf(n)
                }
                _ => return Err(corrupt(format!("unknown section `{trimmed}`"))),
            };
            continue;
        }
        match section {
            Section::Header => {
                let (k, v) = trimmed.split_once('=').ok_or_else(|| corrupt(format!("bad line `{trimmed}`")))?;
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            Section::Config => {
                config_text.push_str(trimmed);
                config_text.push('\n');
            }
            Section::Tf(_) => tf_terms.push(trimmed.to_string()),
            Section::TfIdf(_) => {
                let (t, w) = trimmed.split_once(' ').ok_or_else(|| corrupt(format!("bad idf line `{trimmed}`")))?;
                tfidf_terms.push(t.to_string());
                idf.push(parse_num::<f64>("idf", Some(w))?);
            }
        }
    }

    let get = |k: &str| header.get(k).map(String::as_str);
    let version: u32 = parse_num("format_version", get("format_version"))?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let mut config = TrainConfig::default();
    config.apply_text(&config_text).map_err(|e| corrupt(e.to_string()))?;
    if tf_n != Some(tf_terms.len()) || tfidf_n != Some(tfidf_terms.len()) {
        return Err(corrupt("vocabulary section length does not match its declared size"));
    }
    Ok(Manifest {
        version,
        labels: get("labels").unwrap_or_default().to_string(),
        input_dim: parse_num("input_dim", get("input_dim"))?,
        hidden_size: parse_num("hidden_size", get("hidden_size"))?,
        num_classes: parse_num("num_classes", get("num_classes"))?,
        tfidf_doc_count: parse_num("tfidf_doc_count", get("tfidf_doc_count"))?,
        config,
        tf_terms,
        tfidf_terms,
        idf,
    })
}

fn read_tensors(bytes: &[u8], m: &Manifest) -> Result<MlpParams> {
    let bad = |msg: String| Error::CorruptTensorFile(msg);
    if bytes.len() < TENSOR_HEADER_BYTES {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(bad("missing STNC magic bytes".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != m.version {
        return Err(Error::UnsupportedVersion(version));
    }
    let dim = |k: usize| u64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().expect("8 bytes")) as usize;
    let (input_dim, hidden, classes) = (dim(0), dim(1), dim(2));
    if (input_dim, hidden, classes) != (m.input_dim, m.hidden_size, m.num_classes) {
        return Err(bad(format!(
            "tensor shape {input_dim}x{hidden}x{classes} disagrees with manifest {}x{}x{}",
            m.input_dim, m.hidden_size, m.num_classes
        )));
    }
    let sizes = [input_dim * hidden, hidden, hidden * classes, classes];
    let expected = TENSOR_HEADER_BYTES + 8 * sizes.iter().sum::<usize>();
    if bytes.len() != expected {
        return Err(bad(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let mut values = bytes[TENSOR_HEADER_BYTES..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let mut take = |n: usize| -> Vec<f64> { values.by_ref().take(n).collect() };
    let (w1, b1, w2, b2) = (take(sizes[0]), take(sizes[1]), take(sizes[2]), take(sizes[3]));
    let params = MlpParams::from_tensors(input_dim, hidden, w1, b1, w2, b2)?;
    if params.tensors().iter().any(|t| t.iter().any(|v| !v.is_finite())) {
        return Err(bad("non-finite parameter".into()));
    }
    Ok(params)
}

/// Reconstructs a bundle from manifest text and tensor bytes.
pub fn from_parts(manifest: &str, tensors: &[u8]) -> Result<ModelBundle> {
    let m = parse_manifest(manifest)?;
    if m.labels != labels_line() {
        return Err(corrupt(format!("label table `{}` differs from `{}`", m.labels, labels_line())));
    }
    if m.num_classes != NUM_CLASSES {
        return Err(Error::DimensionMismatch { expected: NUM_CLASSES, found: m.num_classes });
    }
    let expected_dim = feature_dim(m.tf_terms.len());
    if m.input_dim != expected_dim {
        return Err(Error::DimensionMismatch { expected: expected_dim, found: m.input_dim });
    }
    let params = read_tensors(tensors, &m)?;
    let tf_vocab = Vocabulary::from_terms(m.tf_terms)?;
    let tfidf = TfIdfModel::from_parts(Vocabulary::from_terms(m.tfidf_terms)?, m.idf, m.tfidf_doc_count)?;
    let features = FeatureExtractor { tf_vocab, tfidf };
    ModelBundle::new(features, params, m.config)
}
