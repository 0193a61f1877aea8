//! Packaged example domains.

use crate::format::parse_domain;
use crate::ppd::Ppd;

/// Two agents at a junction. Crossing alone succeeds; crossing together
/// from the start collides and blocks both. A1 cannot tell whether A2 has
/// already crossed.
pub const JUNCTION: &str = "\
agents: A1 A2
props: crossed1 crossed2 collision
actions: F
init: {}
epistemic A1: {} {crossed2}
effect+ A1 F crossed1: !(!crossed2 & do(A2,F)) & !collision
effect+ A1 F collision: !crossed1 & !crossed2 & do(A2,F)
effect+ A2 F crossed2: !(!crossed1 & do(A1,F)) & !collision
";

/// Two immobile agents that can lift the table next to them. A1 does not
/// know which table A2 stands at.
pub const TABLES: &str = "\
agents: A1 A2
props: lifted.table1 lifted.table2 at.A1.table1 at.A1.table2 at.A2.table1 at.A2.table2
actions: lift
objects table: table1 table2
init: {at.A1.table1 at.A2.table2}
epistemic A1: {at.A1.table1 at.A2.table2} {at.A1.table1 at.A2.table1}
effect+ A1 lift lifted.table1: !lifted.table1 & at.A1.table1
effect+ A1 lift lifted.table2: !lifted.table2 & at.A1.table2
effect+ A2 lift lifted.table1: !lifted.table1 & at.A2.table1
effect+ A2 lift lifted.table2: !lifted.table2 & at.A2.table2
";

pub const NAMES: [&str; 2] = ["junction", "tables"];

pub fn text(name: &str) -> Option<&'static str> {
    match name {
        "junction" => Some(JUNCTION),
        "tables" => Some(TABLES),
        _ => None,
    }
}

pub fn junction() -> Ppd {
    parse_domain(JUNCTION, "junction")
        .expect("packaged fixture")
        .ppd
}

pub fn tables() -> Ppd {
    parse_domain(TABLES, "tables")
        .expect("packaged fixture")
        .ppd
}
