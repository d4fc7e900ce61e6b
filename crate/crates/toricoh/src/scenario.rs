//! Scenario files: declare a group, lattices, tori, and place families,
//! then run a list of compute directives into a deterministic report.
//!
//! The format is line oriented; `#` starts a comment and blank lines are
//! skipped. Sections open with a bracketed header and run until the next
//! header:
//!
//! ```text
//! [group]            kind = cyclic 4 | klein_four | product cyclic 2 cyclic 2
//!                    kind = table   (followed by row = ... lines)
//! [lattice NAME]     kind = trivial <rank> | regular | permutation <elts>
//!                    kind = dual <name> | sum <name> <name> | norm_quotient
//!                    kind = from_matrices  (followed by gen = ... lines,
//!                    one row-major matrix per canonical group generator)
//! [torus NAME]       kind = norm_one | multinorm <H1;H2;...> | quasi_trivial <H1;...>
//! [places NAME]      place = <label> : <element indices>
//! [compute]          h <i> <lattice>        tate <-1|0> <lattice>
//!                    flasque <lattice>      resolution <torus>
//!                    br <torus>             sha <i> <lattice> <places>
//!                    coverage <places>      transfer <i> <seq> <places>
//! ```
//!
//! Subgroups are written as comma-separated element indices. Declaring a
//! torus `T` registers the lattice `T.hat` and, for norm-type tori, the
//! sequence `T.def`; a `resolution T` directive registers `T.E`, `T.S`,
//! and the sequence `T.res` for later directives; a multinorm torus also
//! answers to the sequence `T.vs_norm` (its comparison with the first
//! declared norm-one torus). Declared names may not contain dots.
//!
//! Reports come in two renderings: `text` for reading and `machine` with
//! one `key=value` record per directive, groups encoded as
//! `rank:r;factors:d1,d2,...`. Both are byte-deterministic for a fixed
//! scenario and engine version.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::cohomology::{tate_h0, tate_h_minus1, CochainComplex};
use crate::group::{FiniteGroup, Subgroup};
use crate::lattice::{GLattice, ShortExactSequence};
use crate::linalg::IntMatrix;
use crate::sha::{chebotarev_coverage, sha_kernel, sha_les_transfer, Place, PlaceFamily};
use crate::tori::{br_invariant, flasque_resolution, is_coflasque, is_flasque, multinorm_comparison, FlasqueResolution, Torus};
use crate::{Caps, Error, Result};

/// A parsed and name-checked scenario, ready to run.
pub struct Scenario {
    name: String,
    group: FiniteGroup,
    lattice_names: Vec<String>,
    lattices: BTreeMap<String, GLattice>,
    torus_names: Vec<String>,
    tori: BTreeMap<String, Torus>,
    family_names: Vec<String>,
    families: BTreeMap<String, PlaceFamily>,
    bridge_base: Option<String>,
    directives: Vec<DirectiveLine>,
}

struct DirectiveLine {
    text: String,
    op: Op,
}

enum Op {
    H { degree: usize, lattice: String },
    Tate { degree: i8, lattice: String },
    Flasque { lattice: String },
    Resolution { torus: String },
    Br { torus: String },
    Sha { degree: usize, lattice: String, family: String },
    Coverage { family: String },
    Transfer { degree: usize, ses: String, family: String },
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

struct Section {
    line: usize,
    header: Vec<String>,
    body: Vec<(usize, String)>,
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let Some(inner) = inner.strip_suffix(']') else {
                return Err(perr(line_no, "unterminated section header"));
            };
            let header: Vec<String> = inner.split_whitespace().map(str::to_string).collect();
            if header.is_empty() {
                return Err(perr(line_no, "empty section header"));
            }
            sections.push(Section { line: line_no, header, body: Vec::new() });
        } else {
            match sections.last_mut() {
                Some(s) => s.body.push((line_no, line.to_string())),
                None => return Err(perr(line_no, "content before the first section header")),
            }
        }
    }
    Ok(sections)
}

fn key_value(line_no: usize, line: &str) -> Result<(String, String)> {
    let Some((k, v)) = line.split_once('=') else {
        return Err(perr(line_no, format!("expected key = value, found {line:?}")));
    };
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn parse_elements(line_no: usize, elts: &str) -> Result<Vec<u16>> {
    let mut out = Vec::new();
    for part in elts.split(',') {
        let part = part.trim();
        out.push(
            part.parse::<u16>()
                .map_err(|_| perr(line_no, format!("bad element index {part:?}")))?,
        );
    }
    Ok(out)
}

fn parse_subgroup(group: &FiniteGroup, line_no: usize, elts: &str) -> Result<Subgroup> {
    let elements = parse_elements(line_no, elts)?;
    group
        .subgroup_from_elements(&elements)
        .map_err(|e| perr(line_no, format!("{elts:?}: {e}")))
}

fn parse_subgroup_list(group: &FiniteGroup, line_no: usize, elts: &str) -> Result<Vec<Subgroup>> {
    let mut subs = Vec::new();
    for part in elts.split(';') {
        subs.push(parse_subgroup(group, line_no, part.trim())?);
    }
    Ok(subs)
}

enum GroupKind {
    Cyclic(usize),
    Klein,
    Product(usize, usize),
    Table,
}

impl GroupKind {
    /// The generator indices the `from_matrices` lattice kind expects, in
    /// the order its `gen =` lines must follow.
    fn generators(&self, group: &FiniteGroup) -> Vec<u16> {
        match self {
            GroupKind::Cyclic(n) => {
                if *n > 1 {
                    vec![1]
                } else {
                    vec![]
                }
            }
            GroupKind::Klein => vec![1, 2],
            GroupKind::Product(n, m) => {
                let mut g = Vec::new();
                if *n > 1 {
                    g.push(*m as u16);
                }
                if *m > 1 {
                    g.push(1);
                }
                g
            }
            GroupKind::Table => {
                (0..group.order() as u16).filter(|&g| g != group.identity()).collect()
            }
        }
    }
}

fn parse_group(section: &Section) -> Result<(FiniteGroup, GroupKind)> {
    let mut kind: Option<(usize, String)> = None;
    let mut rows: Vec<(usize, Vec<u16>)> = Vec::new();
    for (line_no, line) in &section.body {
        let (k, v) = key_value(*line_no, line)?;
        match k.as_str() {
            "kind" => kind = Some((*line_no, v)),
            "row" => {
                let mut row = Vec::new();
                for part in v.split_whitespace() {
                    row.push(
                        part.parse::<u16>()
                            .map_err(|_| perr(*line_no, format!("bad table entry {part:?}")))?,
                    );
                }
                rows.push((*line_no, row));
            }
            other => return Err(perr(*line_no, format!("unknown group key {other:?}"))),
        }
    }
    let Some((kind_line, kind)) = kind else {
        return Err(perr(section.line, "group section needs a kind"));
    };
    let words: Vec<&str> = kind.split_whitespace().collect();
    let built = match words.as_slice() {
        ["cyclic", n] => {
            let n = n.parse().map_err(|_| perr(kind_line, "bad cyclic order"))?;
            (FiniteGroup::cyclic(n).map_err(|e| perr(kind_line, e.to_string()))?, GroupKind::Cyclic(n))
        }
        ["klein_four"] => (FiniteGroup::klein_four(), GroupKind::Klein),
        ["product", "cyclic", n, "cyclic", m] => {
            let n = n.parse().map_err(|_| perr(kind_line, "bad cyclic order"))?;
            let m = m.parse().map_err(|_| perr(kind_line, "bad cyclic order"))?;
            (
                FiniteGroup::product_cyclic(n, m).map_err(|e| perr(kind_line, e.to_string()))?,
                GroupKind::Product(n, m),
            )
        }
        ["table"] => {
            if rows.is_empty() {
                return Err(perr(kind_line, "table kind needs row lines"));
            }
            let table: Vec<Vec<u16>> = rows.iter().map(|(_, r)| r.clone()).collect();
            (
                FiniteGroup::from_multiplication_table("table", table)
                    .map_err(|e| perr(rows[0].0, e.to_string()))?,
                GroupKind::Table,
            )
        }
        _ => return Err(perr(kind_line, format!("unknown group kind {kind:?}"))),
    };
    if !matches!(built.1, GroupKind::Table) && !rows.is_empty() {
        return Err(perr(rows[0].0, "row lines are only for kind = table"));
    }
    Ok(built)
}

fn check_name(line_no: usize, name: &str) -> Result<()> {
    if name.contains('.') {
        return Err(perr(line_no, format!("declared name {name:?} may not contain '.'")));
    }
    Ok(())
}

fn parse_matrix_line(line_no: usize, v: &str) -> Result<Vec<BigInt>> {
    let mut entries = Vec::new();
    for part in v.split_whitespace() {
        entries.push(
            part.parse::<BigInt>()
                .map_err(|_| perr(line_no, format!("bad matrix entry {part:?}")))?,
        );
    }
    Ok(entries)
}

fn square_matrix(line_no: usize, entries: Vec<BigInt>) -> Result<IntMatrix> {
    let rank = (1..=entries.len()).find(|r| r * r == entries.len()).unwrap_or(0);
    if rank == 0 && !entries.is_empty() {
        return Err(perr(line_no, format!("{} entries do not form a square matrix", entries.len())));
    }
    let mut it = entries.into_iter();
    Ok(IntMatrix::from_fn(rank, rank, |_, _| it.next().expect("counted")))
}

/// Completes generator matrices to a full action by breadth-first closure
/// over the group, then hands the result to the lattice constructor for
/// the homomorphism check.
fn action_from_generators(
    line_no: usize,
    name: &str,
    group: &FiniteGroup,
    gens: &[u16],
    matrices: Vec<IntMatrix>,
) -> Result<GLattice> {
    if matrices.len() != gens.len() {
        return Err(perr(
            line_no,
            format!("expected {} gen lines, found {}", gens.len(), matrices.len()),
        ));
    }
    let Some(rank) = matrices.first().map(IntMatrix::rows) else {
        return Err(perr(line_no, "from_matrices needs at least one generator"));
    };
    let n = group.order();
    let mut action: Vec<Option<IntMatrix>> = vec![None; n];
    action[group.identity() as usize] = Some(IntMatrix::identity(rank));
    let mut queue = vec![group.identity()];
    while let Some(x) = queue.pop() {
        let mx = action[x as usize].clone().expect("queued elements have matrices");
        for (g, m) in gens.iter().zip(&matrices) {
            let y = group.mul(x, *g);
            if action[y as usize].is_none() {
                action[y as usize] = Some(mx.mul(m));
                queue.push(y);
            }
        }
    }
    let mut full = Vec::with_capacity(n);
    for (i, m) in action.into_iter().enumerate() {
        match m {
            Some(m) => full.push(m),
            None => {
                return Err(perr(
                    line_no,
                    format!("generators do not reach element {i} of the group"),
                ))
            }
        }
    }
    GLattice::new(name, group.clone(), full).map_err(|e| perr(line_no, e.to_string()))
}

/// Parses scenario text into a validated [`Scenario`]; every name a
/// directive mentions is checked against what is declared (or registered
/// by an earlier directive) and errors carry the offending line.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let sections = split_sections(text)?;
    let mut group: Option<(FiniteGroup, GroupKind)> = None;
    let mut lattice_names = Vec::new();
    let mut lattices: BTreeMap<String, GLattice> = BTreeMap::new();
    let mut torus_names = Vec::new();
    let mut tori: BTreeMap<String, Torus> = BTreeMap::new();
    let mut family_names = Vec::new();
    let mut families: BTreeMap<String, PlaceFamily> = BTreeMap::new();
    let mut bridge_base: Option<String> = None;
    let mut directives = Vec::new();

    for section in &sections {
        let head: Vec<&str> = section.header.iter().map(String::as_str).collect();
        match head.as_slice() {
            ["group"] => {
                if group.is_some() {
                    return Err(perr(section.line, "duplicate [group] section"));
                }
                group = Some(parse_group(section)?);
            }
            ["lattice", name] => {
                let Some((g, gk)) = &group else {
                    return Err(perr(section.line, "declare [group] before lattices"));
                };
                check_name(section.line, name)?;
                if lattices.contains_key(*name) {
                    return Err(perr(section.line, format!("duplicate lattice {name:?}")));
                }
                let lat = parse_lattice(section, name, g, gk, &lattices)?;
                lattice_names.push(name.to_string());
                lattices.insert(name.to_string(), lat);
            }
            ["torus", name] => {
                let Some((g, _)) = &group else {
                    return Err(perr(section.line, "declare [group] before tori"));
                };
                check_name(section.line, name)?;
                if tori.contains_key(*name) {
                    return Err(perr(section.line, format!("duplicate torus {name:?}")));
                }
                let torus = parse_torus(section, name, g)?;
                if torus.is_full_norm_one() && bridge_base.is_none() {
                    bridge_base = Some(name.to_string());
                }
                lattices.insert(format!("{name}.hat"), torus.characters().clone());
                torus_names.push(name.to_string());
                tori.insert(name.to_string(), torus);
            }
            ["places", name] => {
                let Some((g, _)) = &group else {
                    return Err(perr(section.line, "declare [group] before places"));
                };
                check_name(section.line, name)?;
                if families.contains_key(*name) {
                    return Err(perr(section.line, format!("duplicate place family {name:?}")));
                }
                let mut places = Vec::new();
                for (line_no, line) in &section.body {
                    let (k, v) = key_value(*line_no, line)?;
                    if k != "place" {
                        return Err(perr(*line_no, format!("unknown places key {k:?}")));
                    }
                    let Some((label, elts)) = v.split_once(':') else {
                        return Err(perr(*line_no, "expected place = <label> : <elements>"));
                    };
                    let label = label.trim();
                    if label.is_empty() || label.split_whitespace().count() != 1 {
                        return Err(perr(*line_no, "place label must be a single word"));
                    }
                    places.push(Place::new(label, parse_subgroup(g, *line_no, elts.trim())?));
                }
                family_names.push(name.to_string());
                families.insert(name.to_string(), PlaceFamily::new(name, places));
            }
            ["compute"] => {
                for (line_no, line) in &section.body {
                    directives.push((*line_no, parse_directive(*line_no, line)?, line.clone()));
                }
            }
            _ => {
                return Err(perr(
                    section.line,
                    format!("unknown section [{}]", section.header.join(" ")),
                ))
            }
        }
    }

    let Some((group, _)) = group else {
        return Err(perr(1, "scenario has no [group] section"));
    };

    // simulate the run's name registry so bad references fail at parse time
    let mut lat_avail: BTreeSet<String> = lattices.keys().cloned().collect();
    let mut ses_avail: BTreeSet<String> = BTreeSet::new();
    for (name, torus) in &tori {
        if torus.defining_sequence().is_some() {
            ses_avail.insert(format!("{name}.def"));
        }
        if torus.is_multinorm() && bridge_base.is_some() {
            ses_avail.insert(format!("{name}.vs_norm"));
        }
    }
    for (line_no, op, _) in &directives {
        let line_no = *line_no;
        match op {
            Op::H { lattice, .. } | Op::Tate { lattice, .. } | Op::Flasque { lattice } => {
                if !lat_avail.contains(lattice) {
                    return Err(perr(line_no, format!("unknown lattice {lattice:?}")));
                }
            }
            Op::Resolution { torus } | Op::Br { torus } => {
                if !tori.contains_key(torus) {
                    return Err(perr(line_no, format!("unknown torus {torus:?}")));
                }
                if let Op::Resolution { torus } = op {
                    lat_avail.insert(format!("{torus}.E"));
                    lat_avail.insert(format!("{torus}.S"));
                    ses_avail.insert(format!("{torus}.res"));
                }
            }
            Op::Sha { lattice, family, .. } => {
                if !lat_avail.contains(lattice) {
                    return Err(perr(line_no, format!("unknown lattice {lattice:?}")));
                }
                if !families.contains_key(family) {
                    return Err(perr(line_no, format!("unknown place family {family:?}")));
                }
            }
            Op::Coverage { family } => {
                if !families.contains_key(family) {
                    return Err(perr(line_no, format!("unknown place family {family:?}")));
                }
            }
            Op::Transfer { ses, family, .. } => {
                if !ses_avail.contains(ses) {
                    return Err(perr(line_no, format!("unknown sequence {ses:?}")));
                }
                if !families.contains_key(family) {
                    return Err(perr(line_no, format!("unknown place family {family:?}")));
                }
            }
        }
    }

    Ok(Scenario {
        name: "scenario".to_string(),
        group,
        lattice_names,
        lattices,
        torus_names,
        tori,
        family_names,
        families,
        bridge_base,
        directives: directives
            .into_iter()
            .map(|(_, op, text)| DirectiveLine { text, op })
            .collect(),
    })
}

fn parse_lattice(
    section: &Section,
    name: &str,
    group: &FiniteGroup,
    group_kind: &GroupKind,
    lattices: &BTreeMap<String, GLattice>,
) -> Result<GLattice> {
    let mut kind: Option<(usize, String)> = None;
    let mut gens: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for (line_no, line) in &section.body {
        let (k, v) = key_value(*line_no, line)?;
        match k.as_str() {
            "kind" => kind = Some((*line_no, v)),
            "gen" => gens.push((*line_no, parse_matrix_line(*line_no, &v)?)),
            other => return Err(perr(*line_no, format!("unknown lattice key {other:?}"))),
        }
    }
    let Some((kind_line, kind)) = kind else {
        return Err(perr(section.line, "lattice section needs a kind"));
    };
    let words: Vec<&str> = kind.split_whitespace().collect();
    if !matches!(words.first(), Some(&"from_matrices")) && !gens.is_empty() {
        return Err(perr(gens[0].0, "gen lines are only for kind = from_matrices"));
    }
    let get = |n: &str| -> Result<&GLattice> {
        lattices.get(n).ok_or_else(|| perr(kind_line, format!("unknown lattice {n:?}")))
    };
    match words.as_slice() {
        ["trivial", rank] => {
            let rank = rank.parse().map_err(|_| perr(kind_line, "bad rank"))?;
            Ok(GLattice::trivial(group.clone(), rank).with_label(name))
        }
        ["regular"] => Ok(GLattice::regular(group.clone()).with_label(name)),
        ["permutation", elts] => {
            let sub = parse_subgroup(group, kind_line, elts)?;
            Ok(GLattice::permutation(group.clone(), &sub).with_label(name))
        }
        ["dual", other] => Ok(get(other)?.dual().with_label(name)),
        ["sum", a, b] => get(a)?
            .direct_sum(get(b)?)
            .map(|l| l.with_label(name))
            .map_err(|e| perr(kind_line, e.to_string())),
        ["norm_quotient"] => {
            let reg = GLattice::regular(group.clone());
            let ones = IntMatrix::from_fn(reg.rank(), 1, |_, _| BigInt::from(1));
            reg.quotient_by_saturated(name, &ones)
                .map(|(quo, _)| quo)
                .map_err(|e| perr(kind_line, e.to_string()))
        }
        ["from_matrices"] => {
            let matrices: Result<Vec<IntMatrix>> =
                gens.into_iter().map(|(l, e)| square_matrix(l, e)).collect();
            action_from_generators(
                kind_line,
                name,
                group,
                &group_kind.generators(group),
                matrices?,
            )
        }
        _ => Err(perr(kind_line, format!("unknown lattice kind {kind:?}"))),
    }
}

fn parse_torus(section: &Section, name: &str, group: &FiniteGroup) -> Result<Torus> {
    let mut kind: Option<(usize, String)> = None;
    for (line_no, line) in &section.body {
        let (k, v) = key_value(*line_no, line)?;
        if k != "kind" {
            return Err(perr(*line_no, format!("unknown torus key {k:?}")));
        }
        kind = Some((*line_no, v));
    }
    let Some((kind_line, kind)) = kind else {
        return Err(perr(section.line, "torus section needs a kind"));
    };
    let (word, rest) = match kind.split_once(char::is_whitespace) {
        Some((w, r)) => (w, r.trim()),
        None => (kind.as_str(), ""),
    };
    match word {
        "norm_one" => {
            if !rest.is_empty() {
                return Err(perr(kind_line, "norm_one takes no arguments"));
            }
            Torus::norm_one(name, group, &group.trivial_subgroup())
                .map_err(|e| perr(kind_line, e.to_string()))
        }
        "multinorm" => {
            let subs = parse_subgroup_list(group, kind_line, rest)?;
            Torus::multinorm(name, group, &subs).map_err(|e| perr(kind_line, e.to_string()))
        }
        "quasi_trivial" => {
            let subs = parse_subgroup_list(group, kind_line, rest)?;
            Torus::quasi_trivial(name, group, &subs).map_err(|e| perr(kind_line, e.to_string()))
        }
        _ => Err(perr(kind_line, format!("unknown torus kind {kind:?}"))),
    }
}

fn parse_directive(line_no: usize, line: &str) -> Result<Op> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let deg = |w: &str| -> Result<usize> {
        w.parse().map_err(|_| perr(line_no, format!("bad degree {w:?}")))
    };
    match words.as_slice() {
        ["h", i, lattice] => Ok(Op::H { degree: deg(i)?, lattice: lattice.to_string() }),
        ["tate", i, lattice] => {
            let degree = match *i {
                "-1" => -1,
                "0" => 0,
                other => return Err(perr(line_no, format!("tate degree must be -1 or 0, found {other:?}"))),
            };
            Ok(Op::Tate { degree, lattice: lattice.to_string() })
        }
        ["flasque", lattice] => Ok(Op::Flasque { lattice: lattice.to_string() }),
        ["resolution", torus] => Ok(Op::Resolution { torus: torus.to_string() }),
        ["br", torus] => Ok(Op::Br { torus: torus.to_string() }),
        ["sha", i, lattice, family] => Ok(Op::Sha {
            degree: deg(i)?,
            lattice: lattice.to_string(),
            family: family.to_string(),
        }),
        ["coverage", family] => Ok(Op::Coverage { family: family.to_string() }),
        ["transfer", i, ses, family] => Ok(Op::Transfer {
            degree: deg(i)?,
            ses: ses.to_string(),
            family: family.to_string(),
        }),
        _ => Err(perr(line_no, format!("unknown directive {line:?}"))),
    }
}

impl Scenario {
    pub fn with_name(mut self, name: &str) -> Scenario {
        self.name = name.to_string();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Executes every directive in order and assembles the report.
    /// Engine failures come back as [`Error::Directive`] naming the
    /// directive and its position.
    pub fn run(&self, caps: &Caps, verbose_witnesses: bool) -> Result<Report> {
        let mut state = RunState {
            scenario: self,
            caps: *caps,
            verbose: verbose_witnesses,
            resolutions: BTreeMap::new(),
            bridges: BTreeMap::new(),
        };
        let mut entries = Vec::new();
        for (index, d) in self.directives.iter().enumerate() {
            let (lines, machine) = state.execute(&d.op).map_err(|e| Error::Directive {
                index,
                text: d.text.clone(),
                source: Box::new(e),
            })?;
            entries.push(ReportEntry { title: d.text.clone(), lines, machine });
        }
        Ok(Report { header: self.header(caps), prelude: self.prelude(), entries })
    }

    fn header(&self, caps: &Caps) -> Vec<String> {
        vec![
            format!("# scenario: {}", self.name),
            format!("engine: toricoh {}", env!("CARGO_PKG_VERSION")),
            format!("caps: max_degree={}, size_cap={}", caps.max_degree, caps.size_cap),
            "model: places are decomposition subgroups; all values are character-module \
             computations"
                .to_string(),
        ]
    }

    fn prelude(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.push(format!("group: {} (order {})", self.group.label(), self.group.order()));
        let subs: Vec<String> =
            self.group.all_subgroups().iter().map(Subgroup::describe).collect();
        out.push(format!("subgroups: {}", subs.join(" | ")));
        for name in &self.lattice_names {
            out.push(format!("lattice {name}: rank {}", self.lattices[name].rank()));
        }
        for name in &self.torus_names {
            let t = &self.tori[name];
            out.push(format!(
                "torus {name} ({}): characters {name}.hat (rank {})",
                t.kind_text(),
                t.characters().rank()
            ));
        }
        for name in &self.family_names {
            let f = &self.families[name];
            let places: Vec<String> = f
                .places()
                .iter()
                .map(|p| format!("{} -> {}", p.label, p.decomposition.describe()))
                .collect();
            let desc = if places.is_empty() { "(none)".to_string() } else { places.join(" | ") };
            out.push(format!("places {name}: {desc}"));
        }
        out
    }
}

struct RunState<'a> {
    scenario: &'a Scenario,
    caps: Caps,
    verbose: bool,
    resolutions: BTreeMap<String, FlasqueResolution>,
    bridges: BTreeMap<String, ShortExactSequence>,
}

fn vec_text(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
    format!("[{}]", parts.join(", "))
}

impl<'a> RunState<'a> {
    fn lattice(&self, name: &str) -> Result<&GLattice> {
        if let Some(l) = self.scenario.lattices.get(name) {
            return Ok(l);
        }
        if let Some(t) = name.strip_suffix(".S") {
            if let Some(r) = self.resolutions.get(t) {
                return Ok(r.flasque_lattice());
            }
        }
        if let Some(t) = name.strip_suffix(".E") {
            if let Some(r) = self.resolutions.get(t) {
                return Ok(r.permutation_lattice());
            }
        }
        Err(Error::Internal(format!("lattice {name} is not registered yet")))
    }

    fn family(&self, name: &str) -> &PlaceFamily {
        &self.scenario.families[name]
    }

    fn sequence(&self, name: &str) -> Result<&ShortExactSequence> {
        if let Some(t) = name.strip_suffix(".def") {
            if let Some(torus) = self.scenario.tori.get(t) {
                return torus
                    .defining_sequence()
                    .ok_or_else(|| Error::Internal(format!("{t} has no defining sequence")));
            }
        }
        if let Some(t) = name.strip_suffix(".res") {
            if let Some(r) = self.resolutions.get(t) {
                return Ok(&r.ses);
            }
        }
        if let Some(t) = name.strip_suffix(".vs_norm") {
            if let Some(s) = self.bridges.get(t) {
                return Ok(s);
            }
        }
        Err(Error::Internal(format!("sequence {name} is not registered yet")))
    }

    fn ensure_bridge(&mut self, name: &str) -> Result<()> {
        let Some(t) = name.strip_suffix(".vs_norm") else {
            return Ok(());
        };
        if self.bridges.contains_key(t) {
            return Ok(());
        }
        let base = self
            .scenario
            .bridge_base
            .as_ref()
            .ok_or_else(|| Error::Internal("no norm-one torus declared for comparison".into()))?;
        let ses =
            multinorm_comparison(&self.scenario.tori[base], &self.scenario.tori[t])?;
        self.bridges.insert(t.to_string(), ses);
        Ok(())
    }

    fn execute(&mut self, op: &Op) -> Result<(Vec<String>, String)> {
        match op {
            Op::H { degree, lattice } => self.run_h(*degree, lattice),
            Op::Tate { degree, lattice } => self.run_tate(*degree, lattice),
            Op::Flasque { lattice } => self.run_flasque(lattice),
            Op::Resolution { torus } => self.run_resolution(torus),
            Op::Br { torus } => self.run_br(torus),
            Op::Sha { degree, lattice, family } => self.run_sha(*degree, lattice, family),
            Op::Coverage { family } => self.run_coverage(family),
            Op::Transfer { degree, ses, family } => self.run_transfer(*degree, ses, family),
        }
    }

    fn run_h(&self, degree: usize, name: &str) -> Result<(Vec<String>, String)> {
        let lattice = self.lattice(name)?;
        let h = CochainComplex::new(lattice, &self.caps)?.cohomology(degree)?;
        let mut lines = vec![format!("H^{degree}(G, {name}) = {}", h.presentation.text())];
        if self.verbose {
            for (j, g) in h.generators().iter().enumerate() {
                lines.push(format!("cocycle {j}: {}", vec_text(g)));
            }
        }
        let machine = format!(
            "directive=h degree={degree} lattice={name} result={}",
            h.presentation.machine()
        );
        Ok((lines, machine))
    }

    fn run_tate(&self, degree: i8, name: &str) -> Result<(Vec<String>, String)> {
        let lattice = self.lattice(name)?;
        let sq = if degree == 0 { tate_h0(lattice)? } else { tate_h_minus1(lattice)? };
        let lines = vec![format!("H_hat^{degree}(G, {name}) = {}", sq.presentation.text())];
        let machine = format!(
            "directive=tate degree={degree} lattice={name} result={}",
            sq.presentation.machine()
        );
        Ok((lines, machine))
    }

    fn run_flasque(&self, name: &str) -> Result<(Vec<String>, String)> {
        let lattice = self.lattice(name)?;
        let fl = is_flasque(lattice)?;
        let co = is_coflasque(lattice)?;
        let fmt = |checks: &[crate::tori::SubgroupCheck]| -> String {
            let parts: Vec<String> =
                checks.iter().map(|c| format!("{}: {}", c.subgroup, c.group.text())).collect();
            parts.join(" | ")
        };
        let lines = vec![
            format!("H_hat^-1 over subgroups: {}", fmt(&fl.checks)),
            format!("flasque: {}", if fl.holds() { "yes" } else { "no" }),
            format!("H^1 over subgroups: {}", fmt(&co.checks)),
            format!("coflasque: {}", if co.holds() { "yes" } else { "no" }),
        ];
        let machine = format!(
            "directive=flasque lattice={name} flasque={} coflasque={}",
            fl.holds(),
            co.holds()
        );
        Ok((lines, machine))
    }

    fn run_resolution(&mut self, name: &str) -> Result<(Vec<String>, String)> {
        let torus = &self.scenario.tori[name];
        let res = flasque_resolution(torus)?;
        let ranks = (res.ses.sub().rank(), res.ses.mid().rank(), res.ses.quo().rank());
        let summands: Vec<String> = res
            .permutation_certificate
            .summands
            .iter()
            .map(|(sub, mult)| {
                let base = format!("Z[G/{}]", sub.describe());
                if *mult == 1 {
                    base
                } else {
                    format!("{base}^{mult}")
                }
            })
            .collect();
        let lines = vec![
            format!(
                "0 -> {name}.hat -> {name}.E -> {name}.S -> 0 (ranks {} -> {} -> {})",
                ranks.0, ranks.1, ranks.2
            ),
            format!("{name}.E = {}", summands.join(" + ")),
            "permutation certificate: basis verified unimodular and equivariant".to_string(),
            format!(
                "flasque certificate: H_hat^-1(H, {name}.S) = 0 for all {} subgroups",
                res.flasque_certificate.checks.len()
            ),
            format!("registered: lattice {name}.E, lattice {name}.S, sequence {name}.res"),
        ];
        let machine = format!(
            "directive=resolution torus={name} ranks={},{},{} flasque={}",
            ranks.0,
            ranks.1,
            ranks.2,
            res.flasque_certificate.holds()
        );
        self.resolutions.insert(name.to_string(), res);
        Ok((lines, machine))
    }

    fn run_br(&self, name: &str) -> Result<(Vec<String>, String)> {
        let torus = &self.scenario.tori[name];
        let inv = br_invariant(torus)?;
        let lines = vec![
            format!("H^1(G, S_hat) = {}", inv.text()),
            format!("br({name}) = {} (stable under reversing the subgroup cover)", inv.text()),
        ];
        let machine = format!("directive=br torus={name} result={}", inv.machine());
        Ok((lines, machine))
    }

    fn run_sha(&self, degree: usize, name: &str, family: &str) -> Result<(Vec<String>, String)> {
        let lattice = self.lattice(name)?;
        let fam = self.family(family);
        let sha = sha_kernel(lattice, degree, fam, &self.caps)?;
        let mut lines = vec![
            format!("Sha^{degree}_{family}(G, {name}) = {}", sha.presentation.text()),
            format!("ambient H^{degree}(G, {name}) = {}", sha.ambient().presentation.text()),
            format!(
                "witnesses: {}, each cobounds at every place of {family}",
                sha.witnesses().len()
            ),
        ];
        if self.verbose {
            for (j, w) in sha.witnesses().iter().enumerate() {
                lines.push(format!("witness {j}: {}", vec_text(w)));
            }
        }
        let machine = format!(
            "directive=sha degree={degree} lattice={name} family={family} result={} ambient={}",
            sha.presentation.machine(),
            sha.ambient().presentation.machine()
        );
        Ok((lines, machine))
    }

    fn run_coverage(&self, family: &str) -> Result<(Vec<String>, String)> {
        let report = chebotarev_coverage(&self.scenario.group, self.family(family))?;
        let mut lines = Vec::new();
        for c in &report.checks {
            match &c.covered_by {
                Some(p) => lines.push(format!("{}: covered by {p}", c.subgroup)),
                None => lines.push(format!("{}: uncovered", c.subgroup)),
            }
        }
        let uncovered = report.uncovered().len();
        if report.covered() {
            lines.push("coverage: complete".to_string());
        } else {
            let noun = if uncovered == 1 { "subgroup" } else { "subgroups" };
            lines.push(format!("coverage: incomplete ({uncovered} cyclic {noun} uncovered)"));
        }
        let machine = format!(
            "directive=coverage family={family} covered={} uncovered={uncovered}",
            report.covered()
        );
        Ok((lines, machine))
    }

    fn run_transfer(
        &mut self,
        degree: usize,
        ses_name: &str,
        family: &str,
    ) -> Result<(Vec<String>, String)> {
        self.ensure_bridge(ses_name)?;
        let ses = self.sequence(ses_name)?;
        let fam = self.family(family);
        let report = sha_les_transfer(ses, degree, fam, &self.caps)?;
        let arrow = |injective: bool, surjective: bool| -> String {
            let mut s = format!(
                "injective {}, surjective {}",
                if injective { "yes" } else { "no" },
                if surjective { "yes" } else { "no" }
            );
            if injective && surjective {
                s.push_str(" (isomorphism)");
            }
            s
        };
        let lines = vec![
            format!(
                "Sha^{degree}_{family}(G, {}) -> Sha^{}_{family}(G, {}) -> Sha^{}_{family}(G, {})",
                ses.quo().label(),
                degree + 1,
                ses.sub().label(),
                degree + 1,
                ses.mid().label()
            ),
            format!(
                "groups: {} -> {} -> {}",
                report.first.presentation.text(),
                report.middle.presentation.text(),
                report.last.presentation.text()
            ),
            format!("connecting map: {}", arrow(report.connecting_injective, report.connecting_surjective)),
            format!("induced map: {}", arrow(report.induced_injective, report.induced_surjective)),
            format!("exact at middle: {}", if report.exact_at_middle { "yes" } else { "no" }),
        ];
        let machine = format!(
            "directive=transfer degree={degree} ses={ses_name} family={family} first={} middle={} last={} \
             connecting_injective={} connecting_surjective={} induced_injective={} \
             induced_surjective={} exact={}",
            report.first.presentation.machine(),
            report.middle.presentation.machine(),
            report.last.presentation.machine(),
            report.connecting_injective,
            report.connecting_surjective,
            report.induced_injective,
            report.induced_surjective,
            report.exact_at_middle
        );
        Ok((lines, machine))
    }
}

/// A finished run: header, declarations overview, and one entry per
/// directive, rendered either as readable text or as machine records.
pub struct Report {
    header: Vec<String>,
    prelude: Vec<String>,
    entries: Vec<ReportEntry>,
}

struct ReportEntry {
    title: String,
    lines: Vec<String>,
    machine: String,
}

impl Report {
    pub fn text(&self) -> String {
        let mut out = String::new();
        for l in &self.header {
            out.push_str(l);
            out.push('\n');
        }
        out.push('\n');
        for l in &self.prelude {
            out.push_str(l);
            out.push('\n');
        }
        for e in &self.entries {
            out.push('\n');
            out.push_str("## ");
            out.push_str(&e.title);
            out.push('\n');
            for l in &e.lines {
                out.push_str(l);
                out.push('\n');
            }
        }
        out
    }

    pub fn machine(&self) -> String {
        let mut out = format!("scenario={}\n", self.header[0].trim_start_matches("# scenario: "));
        for e in &self.entries {
            out.push_str(&e.machine);
            out.push('\n');
        }
        out
    }
}

/// The built-in scenario: the biquadratic norm-one torus, its multinorm
/// companion, the flasque resolution with certificates, and the kernel
/// and coverage tables for the family of the three order-2 decomposition
/// groups.
pub fn builtin_paper_biquadratic() -> Scenario {
    parse_scenario(PAPER_BIQUADRATIC)
        .expect("builtin scenario parses")
        .with_name("paper-biquadratic")
}

/// Source text of [`builtin_paper_biquadratic`], also usable as a
/// starting point for scenario files.
pub const PAPER_BIQUADRATIC: &str = "\
# Biquadratic norm-one torus: the Galois group is the Klein four-group,
# places are modeled by its three order-2 subgroups.

[group]
kind = klein_four

[lattice Z]
kind = trivial 1

[lattice Qhat]
kind = norm_quotient

[torus Q]
kind = norm_one

[torus Qt]
kind = multinorm 0,1; 0,2; 0,3

[places nowhere]

[places omega1]
place = v1 : 0,1

[places omega3]
place = v1 : 0,1
place = v2 : 0,2
place = v3 : 0,3

[compute]
h 3 Z
h 2 Qhat
h 1 Qhat
tate -1 Qhat
transfer 2 Q.def nowhere
resolution Q
flasque Q.S
h 1 Q.S
br Q
sha 1 Qhat omega3
sha 2 Qhat omega3
sha 1 Q.S omega3
sha 2 Q.S omega3
transfer 1 Q.res omega3
transfer 1 Qt.vs_norm omega3
coverage omega3
coverage omega1
";

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[group]
kind = cyclic 2

[lattice Z]
kind = trivial 1

[compute]
h 2 Z
";

    fn expect_parse_error(text: &str) -> Error {
        match parse_scenario(text) {
            Err(e) => e,
            Ok(_) => panic!("scenario should not parse"),
        }
    }

    #[test]
    fn minimal_scenario_parses_and_runs() {
        let s = parse_scenario(MINIMAL).unwrap();
        let report = s.run(&Caps::default(), false).unwrap();
        assert!(report.text().contains("H^2(G, Z) = Z/2"));
        assert!(report.machine().contains("directive=h degree=2 lattice=Z result=rank:0;factors:2"));
    }

    #[test]
    fn undeclared_lattice_is_named_with_its_line() {
        let bad = "[group]\nkind = cyclic 2\n\n[compute]\nh 1 Shat\n";
        match expect_parse_error(bad) {
            Error::Parse { line, message } => {
                assert_eq!(line, 5);
                assert!(message.contains("Shat"), "message was {message:?}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn directive_errors_carry_context() {
        let s = parse_scenario("[group]\nkind = cyclic 2\n[lattice Z]\nkind = trivial 1\n[compute]\nh 7 Z\n")
            .unwrap();
        match s.run(&Caps::default(), false) {
            Err(Error::Directive { index: 0, text, source }) => {
                assert_eq!(text, "h 7 Z");
                assert!(matches!(*source, Error::DegreeOutOfRange { .. }));
            }
            Err(other) => panic!("expected a directive error, got {other:?}"),
            Ok(_) => panic!("degree 7 must exceed the default cap"),
        }
    }

    #[test]
    fn empty_compute_gives_header_only() {
        let s = parse_scenario("[group]\nkind = klein_four\n").unwrap();
        let report = s.run(&Caps::default(), false).unwrap();
        let text = report.text();
        assert!(text.contains("group: V4 (order 4)"));
        assert!(text.contains("subgroups: {e} | {e, a} | {e, b} | {e, ab} | {e, a, b, ab}"));
        assert!(!text.contains("##"));
    }

    #[test]
    fn from_matrices_lattice_round_trips_the_sign_action() {
        let s = parse_scenario(
            "[group]\nkind = cyclic 2\n[lattice Sgn]\nkind = from_matrices\ngen = -1\n[compute]\nh 1 Sgn\n",
        )
        .unwrap();
        let report = s.run(&Caps::default(), false).unwrap();
        assert!(report.text().contains("H^1(G, Sgn) = Z/2"));
    }

    #[test]
    fn product_group_from_matrices_needs_both_generators() {
        let err = expect_parse_error(
            "[group]\nkind = product cyclic 2 cyclic 2\n[lattice M]\nkind = from_matrices\ngen = -1\n",
        );
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn table_group_kind_builds() {
        let s = parse_scenario(
            "[group]\nkind = table\nrow = 0 1\nrow = 1 0\n[lattice Z]\nkind = trivial 1\n[compute]\nh 2 Z\n",
        )
        .unwrap();
        assert_eq!(s.group().order(), 2);
        let report = s.run(&Caps::default(), false).unwrap();
        assert!(report.text().contains("H^2(G, Z) = Z/2"));
    }

    #[test]
    fn builtin_parses_with_expected_shape() {
        let s = builtin_paper_biquadratic();
        assert_eq!(s.name(), "paper-biquadratic");
        assert_eq!(s.group().order(), 4);
        assert_eq!(s.directives.len(), 17);
        assert_eq!(s.lattices.len(), 4); // Z, Qhat, Q.hat, Qt.hat
        assert_eq!(s.tori.len(), 2);
        assert_eq!(s.families.len(), 3);
    }

    #[test]
    fn dot_in_declared_names_is_rejected() {
        let err = expect_parse_error("[group]\nkind = cyclic 2\n[lattice A.B]\nkind = trivial 1\n");
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn transfer_before_resolution_is_a_parse_error() {
        let text = "\
[group]
kind = klein_four
[torus Q]
kind = norm_one
[places nowhere]
[compute]
transfer 1 Q.res nowhere
";
        match expect_parse_error(text) {
            Error::Parse { line, message } => {
                assert_eq!(line, 7);
                assert!(message.contains("Q.res"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn small_report_is_deterministic() {
        let text = "\
[group]
kind = klein_four
[lattice Z]
kind = trivial 1
[places omega]
place = v1 : 0,1
[compute]
h 2 Z
sha 2 Z omega
coverage omega
";
        let s = parse_scenario(text).unwrap();
        let a = s.run(&Caps::default(), true).unwrap();
        let b = s.run(&Caps::default(), true).unwrap();
        assert_eq!(a.text(), b.text());
        assert_eq!(a.machine(), b.machine());
    }
}
