//! FNC-1 style datasets: article bodies keyed by id plus headline/body
//! stance instances.
//!
//! On-disk formats are RFC 4180 CSV, UTF-8, with a header row:
//! `Body ID,articleBody` for bodies and `Headline,Body ID[,Stance]` for
//! instances. Columns are located by header name, so extra columns are
//! ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::label::StanceLabel;

pub const BODY_ID_COLUMN: &str = "Body ID";
pub const BODY_TEXT_COLUMN: &str = "articleBody";
pub const HEADLINE_COLUMN: &str = "Headline";
pub const STANCE_COLUMN: &str = "Stance";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleBody {
    pub body_id: u64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub headline: String,
    pub body_id: u64,
    pub stance: Option<StanceLabel>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    pub bodies: BTreeMap<u64, ArticleBody>,
    pub instances: Vec<Instance>,
}

impl Dataset {
    /// Builds a dataset and checks referential integrity.
    pub fn new(bodies: BTreeMap<u64, ArticleBody>, instances: Vec<Instance>) -> Result<Self> {
        let ds = Dataset { bodies, instances };
        ds.validate()?;
        Ok(ds)
    }

    /// Loads a bodies file and a stances file and validates the join.
    pub fn load(bodies: impl AsRef<Path>, stances: impl AsRef<Path>, labeled: bool) -> Result<Self> {
        let bodies = load_bodies(bodies)?;
        let instances = load_stances(stances, labeled)?;
        Dataset::new(bodies, instances)
    }

    /// Every instance must resolve to a body. Dangling ids are reported
    /// sorted and deduplicated.
    pub fn validate(&self) -> Result<()> {
        let dangling: BTreeSet<u64> = self
            .instances
            .iter()
            .map(|i| i.body_id)
            .filter(|id| !self.bodies.contains_key(id))
            .collect();
        if dangling.is_empty() {
            Ok(())
        } else {
            Err(Error::DanglingBodyIds(dangling.into_iter().collect()))
        }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Body text of an instance. Panics on a dangling id; call
    /// [`Dataset::validate`] first.
    pub fn body_text(&self, instance: &Instance) -> &str {
        &self.bodies[&instance.body_id].text
    }

    /// Gold labels in instance order; fails on the first unlabeled instance.
    pub fn labels(&self) -> Result<Vec<StanceLabel>> {
        self.instances
            .iter()
            .enumerate()
            .map(|(i, inst)| inst.stance.ok_or(Error::Unlabeled(i)))
            .collect()
    }

    /// Headlines and bodies with duplicates removed, in first-seen order
    /// (headlines first, then bodies by ascending id).
    pub fn unique_texts(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let heads = self.instances.iter().map(|i| i.headline.as_str());
        let bodies = self.bodies.values().map(|b| b.text.as_str());
        for text in heads.chain(bodies) {
            if seen.insert(text) {
                out.push(text.to_string());
            }
        }
        out
    }

    /// Subset of this dataset restricted to the given body ids; instance
    /// order is preserved.
    fn restrict(&self, ids: &BTreeSet<u64>) -> Dataset {
        Dataset {
            bodies: self
                .bodies
                .iter()
                .filter(|(id, _)| ids.contains(id))
                .map(|(id, b)| (*id, b.clone()))
                .collect(),
            instances: self
                .instances
                .iter()
                .filter(|i| ids.contains(&i.body_id))
                .cloned()
                .collect(),
        }
    }
}

/// Deduplicated texts of several datasets, in order.
pub fn unique_texts<'a>(datasets: impl IntoIterator<Item = &'a Dataset>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for ds in datasets {
        for t in ds.unique_texts() {
            if seen.insert(t.clone()) {
                out.push(t);
            }
        }
    }
    out
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: name.to_string(),
        })
}

fn parse_body_id(raw: &str, record: u64, path: &Path) -> Result<u64> {
    raw.trim().parse().map_err(|_| Error::InvalidBodyId {
        path: path.to_path_buf(),
        record,
        value: raw.to_string(),
    })
}

pub fn load_bodies(path: impl AsRef<Path>) -> Result<BTreeMap<u64, ArticleBody>> {
    let path = path.as_ref();
    read_bodies(open(path)?, path)
}

/// Reads a bodies CSV from any reader; `origin` is used in error messages.
pub fn read_bodies<R: Read>(reader: R, origin: &Path) -> Result<BTreeMap<u64, ArticleBody>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::csv(origin, e))?.clone();
    let id_col = column(&headers, BODY_ID_COLUMN, origin)?;
    let text_col = column(&headers, BODY_TEXT_COLUMN, origin)?;

    let mut bodies = BTreeMap::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(origin, e))?;
        let body_id = parse_body_id(&rec[id_col], n as u64 + 1, origin)?;
        let text = rec[text_col].to_string();
        if text.trim().is_empty() {
            return Err(Error::EmptyBody(body_id));
        }
        if bodies.insert(body_id, ArticleBody { body_id, text }).is_some() {
            return Err(Error::DuplicateBodyId(body_id));
        }
    }
    Ok(bodies)
}

pub fn load_stances(path: impl AsRef<Path>, labeled: bool) -> Result<Vec<Instance>> {
    let path = path.as_ref();
    read_stances(open(path)?, path, labeled)
}

/// Reads a stances CSV. With `labeled` the `Stance` column is required;
/// without it any `Stance` column is ignored.
pub fn read_stances<R: Read>(reader: R, origin: &Path, labeled: bool) -> Result<Vec<Instance>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::csv(origin, e))?.clone();
    let head_col = column(&headers, HEADLINE_COLUMN, origin)?;
    let id_col = column(&headers, BODY_ID_COLUMN, origin)?;
    let stance_col = if labeled {
        Some(column(&headers, STANCE_COLUMN, origin)?)
    } else {
        None
    };

    let mut out = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(origin, e))?;
        let body_id = parse_body_id(&rec[id_col], n as u64 + 1, origin)?;
        let stance = match stance_col {
            Some(c) => Some(rec[c].parse::<StanceLabel>()?),
            None => None,
        };
        out.push(Instance {
            headline: rec[head_col].to_string(),
            body_id,
            stance,
        });
    }
    Ok(out)
}

pub fn write_bodies<'a, W: Write>(
    writer: W,
    bodies: impl IntoIterator<Item = &'a ArticleBody>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([BODY_ID_COLUMN, BODY_TEXT_COLUMN])?;
    for b in bodies {
        w.write_record([b.body_id.to_string().as_str(), b.text.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes instances. The `Stance` column is emitted when every instance
/// carries a label, using the lowercase label strings.
pub fn write_stances<'a, W: Write>(
    writer: W,
    instances: impl IntoIterator<Item = &'a Instance>,
) -> csv::Result<()> {
    let instances: Vec<&Instance> = instances.into_iter().collect();
    let labeled = instances.iter().all(|i| i.stance.is_some());
    let mut w = csv::Writer::from_writer(writer);
    if labeled {
        w.write_record([HEADLINE_COLUMN, BODY_ID_COLUMN, STANCE_COLUMN])?;
    } else {
        w.write_record([HEADLINE_COLUMN, BODY_ID_COLUMN])?;
    }
    for i in instances {
        let id = i.body_id.to_string();
        match i.stance {
            Some(s) if labeled => w.write_record([i.headline.as_str(), &id, s.as_str()])?,
            _ => w.write_record([i.headline.as_str(), &id])?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Partitions a dataset by body id into (train, holdout).
///
/// The holdout receives `round(fraction * n_bodies)` bodies, at least one
/// and at most `n_bodies - 1`. Every instance follows its body. The
/// partition depends only on the set of body ids, `fraction` and `seed`.
pub fn split_by_body_id(dataset: &Dataset, holdout_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(Error::Config(format!(
            "holdout fraction must lie in (0, 1), got {holdout_fraction}"
        )));
    }
    dataset.validate()?;
    let n = dataset.bodies.len();
    if n < 2 {
        return Err(Error::TooFewBodies(n));
    }
    let n_holdout = ((holdout_fraction * n as f64).round() as usize).clamp(1, n - 1);

    let mut ids: Vec<u64> = dataset.bodies.keys().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);

    let holdout: BTreeSet<u64> = ids[..n_holdout].iter().copied().collect();
    let train: BTreeSet<u64> = ids[n_holdout..].iter().copied().collect();
    Ok((dataset.restrict(&train), dataset.restrict(&holdout)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn origin() -> &'static Path {
        Path::new("<test>")
    }

    fn toy(n_bodies: u64, per_body: usize) -> Dataset {
        let bodies = (0..n_bodies)
            .map(|id| (id, ArticleBody { body_id: id, text: format!("body text {id}") }))
            .collect();
        let instances = (0..n_bodies)
            .flat_map(|id| {
                (0..per_body).map(move |k| Instance {
                    headline: format!("headline {id}/{k}"),
                    body_id: id,
                    stance: StanceLabel::from_code(k % 4),
                })
            })
            .collect();
        Dataset::new(bodies, instances).unwrap()
    }

    #[test]
    fn loads_two_bodies() {
        let csv = "Body ID,articleBody\n0,\"first, quoted\nbody\"\n4,second\n";
        let b = read_bodies(csv.as_bytes(), origin()).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[&0].text, "first, quoted\nbody");
        assert_eq!(b[&4].text, "second");
    }

    #[test]
    fn duplicate_body_id_rejected() {
        let csv = "Body ID,articleBody\n7,a\n7,b\n";
        assert!(matches!(read_bodies(csv.as_bytes(), origin()), Err(Error::DuplicateBodyId(7))));
    }

    #[test]
    fn non_integer_body_id_rejected() {
        let csv = "Body ID,articleBody\nseven,a\n";
        assert!(matches!(read_bodies(csv.as_bytes(), origin()), Err(Error::InvalidBodyId { .. })));
    }

    #[test]
    fn empty_body_rejected() {
        let csv = "Body ID,articleBody\n1,\"  \"\n";
        assert!(matches!(read_bodies(csv.as_bytes(), origin()), Err(Error::EmptyBody(1))));
    }

    #[test]
    fn malformed_row_rejected() {
        let csv = "Body ID,articleBody\n1,a,extra\n";
        assert!(matches!(read_bodies(csv.as_bytes(), origin()), Err(Error::Csv { .. })));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load_bodies("/nonexistent/bodies.csv"), Err(Error::Io { .. })));
    }

    #[test]
    fn parses_labeled_stance_row() {
        let csv = "Headline,Body ID,Stance\nh,0,unrelated\n";
        let v = read_stances(csv.as_bytes(), origin(), true).unwrap();
        assert_eq!(
            v,
            vec![Instance { headline: "h".into(), body_id: 0, stance: Some(StanceLabel::Unrelated) }]
        );
    }

    #[test]
    fn unknown_label_rejected() {
        let csv = "Headline,Body ID,Stance\nh,0,Sceptical\n";
        assert!(matches!(read_stances(csv.as_bytes(), origin(), true), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn missing_stance_column() {
        let csv = "Headline,Body ID\nh,0\n";
        assert!(matches!(
            read_stances(csv.as_bytes(), origin(), true),
            Err(Error::MissingColumn { column, .. }) if column == "Stance"
        ));
        let v = read_stances(csv.as_bytes(), origin(), false).unwrap();
        assert_eq!(v[0].stance, None);
    }

    #[test]
    fn validate_reports_dangling_ids() {
        let mut ds = toy(3, 1);
        assert!(ds.validate().is_ok());
        ds.instances.push(Instance { headline: "x".into(), body_id: 99, stance: None });
        assert!(matches!(ds.validate(), Err(Error::DanglingBodyIds(ids)) if ids == vec![99]));
        assert!(Dataset::default().validate().is_ok());
    }

    #[test]
    fn split_sizes() {
        let ds = toy(10, 2);
        let (train, hold) = split_by_body_id(&ds, 0.2, 1).unwrap();
        assert_eq!(hold.bodies.len(), 2);
        assert_eq!(train.bodies.len(), 8);
        assert!(hold.bodies.keys().all(|k| !train.bodies.contains_key(k)));

        let again = split_by_body_id(&ds, 0.2, 1).unwrap();
        assert_eq!((train, hold), again);

        let (_, hold) = split_by_body_id(&ds, 0.05, 1).unwrap();
        assert_eq!(hold.bodies.len(), 1);
    }

    #[test]
    fn split_needs_two_bodies() {
        assert!(matches!(split_by_body_id(&toy(1, 3), 0.5, 0), Err(Error::TooFewBodies(1))));
    }

    #[test]
    fn write_then_read_is_identity() {
        let ds = toy(4, 3);
        let mut b = Vec::new();
        write_bodies(&mut b, ds.bodies.values()).unwrap();
        let mut s = Vec::new();
        write_stances(&mut s, &ds.instances).unwrap();
        let bodies = read_bodies(b.as_slice(), origin()).unwrap();
        let instances = read_stances(s.as_slice(), origin(), true).unwrap();
        assert_eq!(Dataset::new(bodies, instances).unwrap(), ds);
    }

    proptest! {
        #[test]
        fn split_partitions_instances(
            n_bodies in 2u64..30,
            per_body in 1usize..4,
            frac in 0.01f64..0.99,
            seed in any::<u64>(),
        ) {
            let ds = toy(n_bodies, per_body);
            let (train, hold) = split_by_body_id(&ds, frac, seed).unwrap();
            prop_assert!(train.bodies.keys().all(|k| !hold.bodies.contains_key(k)));
            prop_assert_eq!(train.bodies.len() + hold.bodies.len(), ds.bodies.len());
            prop_assert!(train.validate().is_ok() && hold.validate().is_ok());
            let mut all: Vec<_> = train.instances.iter().chain(&hold.instances).cloned().collect();
            let mut orig = ds.instances.clone();
            all.sort_by(|a, b| a.headline.cmp(&b.headline));
            orig.sort_by(|a, b| a.headline.cmp(&b.headline));
            prop_assert_eq!(all, orig);
        }

        #[test]
        fn csv_round_trip(
            texts in proptest::collection::vec("[a-zA-Z ,\"\n]{0,20}[a-z]", 1..6),
            heads in proptest::collection::vec(("[ -~]{0,15}", 0usize..4), 0..8),
        ) {
            let bodies: BTreeMap<u64, ArticleBody> = texts
                .into_iter()
                .enumerate()
                .map(|(i, t)| (i as u64 * 3, ArticleBody { body_id: i as u64 * 3, text: t }))
                .collect();
            let ids: Vec<u64> = bodies.keys().copied().collect();
            let instances: Vec<Instance> = heads
                .into_iter()
                .enumerate()
                .map(|(i, (h, code))| Instance {
                    headline: h,
                    body_id: ids[i % ids.len()],
                    stance: StanceLabel::from_code(code),
                })
                .collect();
            let mut b = Vec::new();
            write_bodies(&mut b, bodies.values()).unwrap();
            let mut s = Vec::new();
            write_stances(&mut s, &instances).unwrap();
            prop_assert_eq!(read_bodies(b.as_slice(), origin()).unwrap(), bodies);
            prop_assert_eq!(read_stances(s.as_slice(), origin(), true).unwrap(), instances);
        }
    }
}
