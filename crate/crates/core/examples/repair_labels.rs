//! Both pairing-repair policies on a few broken predictions.
//!
//!     cargo run --example repair_labels

use punct_restore::postprocess::{repair_pairing, validate_pairing, RepairPolicy};
use punct_restore::PunctClass::{self, *};

fn main() {
    let cases: [&[PunctClass]; 4] = [
        &[OpenQuestion, None, None],
        &[None, None, CloseQuestion],
        &[OpenExclamation, None, CloseQuestion],
        &[OpenQuestion, OpenQuestion, None, CloseQuestion],
    ];
    for labels in cases {
        println!("{labels:?} valid={}", validate_pairing(labels));
        for policy in [RepairPolicy::DropOpenInsertOpen, RepairPolicy::DropBoth] {
            println!("  {policy:?}: {:?}", repair_pairing(labels, policy));
        }
    }
}
