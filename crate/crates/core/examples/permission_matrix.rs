//! Prints which group may perform which action.

use ideaforge_core::access::{Action, PermissionMatrix};
use ideaforge_core::GroupId;

fn main() {
    let m = PermissionMatrix::default();
    print!("{:<18}", "");
    for g in GroupId::ALL {
        print!("{:>4}", g);
    }
    println!();
    for a in Action::ALL {
        print!("{:<18}", a.name());
        for g in GroupId::ALL {
            print!("{:>4}", if m.allows(g, a) { "x" } else { "." });
        }
        println!();
    }
    if std::env::args().any(|a| a == "--tsv") {
        print!("{}", m.to_tsv());
    }
}
