//! Synthetic headline/body data with class-indicative terms.
//!
//! Each instance gets its own body. Related pairs share topic words
//! between headline and body; unrelated pairs use a different topic in
//! the body. Every body also carries marker terms specific to its stance,
//! so the four classes are linearly separable in the TF features.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ArticleBody, Dataset, Instance};
use crate::label::StanceLabel;

const TOPICS: usize = 12;
const FILLER: usize = 40;

fn markers(label: StanceLabel) -> [&'static str; 2] {
    match label {
        StanceLabel::Agree => ["confirms", "verified"],
        StanceLabel::Disagree => ["denies", "debunked"],
        StanceLabel::Discuss => ["allegedly", "reportedly"],
        StanceLabel::Unrelated => ["recipe", "football"],
    }
}

fn topic_words(topic: usize) -> Vec<String> {
    (0..3).map(|k| format!("topic{topic}word{k}")).collect()
}

fn filler<R: Rng>(rng: &mut R, n: usize) -> Vec<String> {
    (0..n).map(|_| format!("filler{}", rng.gen_range(0..FILLER))).collect()
}

/// `n` instances with labels cycling agree, disagree, discuss, unrelated;
/// body ids are `0..n`.
pub fn separable_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bodies = BTreeMap::new();
    let mut instances = Vec::with_capacity(n);
    for i in 0..n {
        let label = StanceLabel::from_code(i % 4).expect("code below 4");
        let topic = rng.gen_range(0..TOPICS);
        let body_topic = if label.is_related() {
            topic
        } else {
            (topic + rng.gen_range(1..TOPICS)) % TOPICS
        };

        let mut head = topic_words(topic);
        head.extend(filler(&mut rng, 2));
        head.shuffle(&mut rng);

        let mut body = topic_words(body_topic);
        body.extend(markers(label).iter().map(|m| m.to_string()));
        body.extend(filler(&mut rng, 6));
        body.shuffle(&mut rng);

        let body_id = i as u64;
        bodies.insert(body_id, ArticleBody { body_id, text: body.join(" ") });
        instances.push(Instance { headline: head.join(" "), body_id, stance: Some(label) });
    }
    Dataset::new(bodies, instances).expect("every instance has its own body")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_and_deterministic() {
        let ds = separable_dataset(200, 1);
        assert_eq!(ds, separable_dataset(200, 1));
        let labels = ds.labels().unwrap();
        for l in StanceLabel::ALL {
            assert_eq!(labels.iter().filter(|x| **x == l).count(), 50);
        }
        assert_eq!(ds.bodies.len(), 200);
    }
}
