//! Register high-water marks of the strict paths on growing cycles. The
//! runs are cut short by the loop caps, but the mark does not depend on
//! how far they got.

use logwalk::audit::{audited_run, AuditArgs, AuditTarget};
use logwalk::graph::generators;

fn main() {
    let args = AuditArgs::default();
    for target in AuditTarget::ALL {
        let marks: Vec<usize> = [8, 16, 32, 64, 128]
            .into_iter()
            .map(|n| audited_run(target, &generators::cycle(n), &args).high_water)
            .collect();
        println!("{:16} {marks:?}", target.name());
    }
}
