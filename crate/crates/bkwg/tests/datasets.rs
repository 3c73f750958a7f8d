use bkwg::datasets::{bundled, BUNDLED_IDS, CHEMO, NICOTINE};
use sha2::{Digest, Sha256};

fn digest(values: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn nicotine_is_pinned() {
    assert_eq!(NICOTINE.len(), 346);
    assert_eq!(
        digest(&NICOTINE),
        "3bdf58209bc8c7e400401232fe768eac3f8d104c1e4634e0cffd424708205ef3"
    );
}

#[test]
fn chemo_is_pinned() {
    assert_eq!(CHEMO.len(), 45);
    assert_eq!(
        digest(&CHEMO),
        "b49634f4390e84a6d67bc7c92504fd482dac9c81e9ecef3e1d792773bc6e4f92"
    );
    assert!(CHEMO.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn lookup_by_id() {
    for id in BUNDLED_IDS {
        assert!(bundled(id).is_some());
    }
    assert!(bundled("iris").is_none());
}
