//! Domain types: branching variables, gaps, instances and tree sizes.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A branching variable, the pair of dual-bound gains of its two children.
///
/// Kept in canonical orientation `1 <= left <= right`; constructors swap the
/// inputs when given in the other order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    left: u32,
    right: u32,
}

impl Variable {
    /// Builds a variable, swapping the gains into `left <= right` order.
    ///
    /// Panics if either gain is zero; use [`Variable::try_new`] for fallible
    /// construction from unchecked input.
    pub fn new(a: u32, b: u32) -> Variable {
        Variable::try_new(a, b).expect("gains must be >= 1")
    }

    /// Fallible constructor: `None` if either gain is zero.
    pub fn try_new(a: u32, b: u32) -> Option<Variable> {
        if a == 0 || b == 0 {
            return None;
        }
        let (left, right) = if a <= b { (a, b) } else { (b, a) };
        Some(Variable { left, right })
    }

    pub fn left(&self) -> u32 {
        self.left
    }

    pub fn right(&self) -> u32 {
        self.right
    }

    /// Strict componentwise dominance: both gains at least as large and at
    /// least one strictly larger. Equal pairs do not dominate each other.
    pub fn dominates(&self, other: &Variable) -> bool {
        self.left >= other.left
            && self.right >= other.right
            && (self.left > other.left || self.right > other.right)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left, self.right)
    }
}

/// Strict componentwise dominance between two variables.
pub fn dominates(a: &Variable, b: &Variable) -> bool {
    a.dominates(b)
}

/// A remaining dual gap. Zero or negative values mark leaf nodes; they occur
/// as intermediate states when a gain overshoots the gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gap(pub i64);

impl Gap {
    /// A gap that is already closed (a leaf condition).
    pub fn is_closed(&self) -> bool {
        self.0 <= 0
    }
}

impl From<i64> for Gap {
    fn from(v: i64) -> Gap {
        Gap(v)
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Per-variable caps on how many times each variable may be branched on
/// along a single root-to-leaf path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiplicities(pub Vec<u32>);

impl Multiplicities {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&m| m as u64).sum()
    }

    /// True when every variable may be used at most once per path.
    pub fn all_unit(&self) -> bool {
        self.0.iter().all(|&m| m <= 1)
    }
}

/// A branching problem: variables with multiplicities and a target gap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    variables: Vec<Variable>,
    multiplicities: Multiplicities,
    gap: Gap,
}

impl Instance {
    /// Assembles an instance from already-canonical parts.
    ///
    /// Panics when the multiplicity vector length disagrees with the
    /// variable count, when no variables are given, or when the gap is
    /// negative; use [`validate_instance`] for unchecked input.
    pub fn from_parts(
        variables: Vec<Variable>,
        multiplicities: Multiplicities,
        gap: Gap,
    ) -> Instance {
        assert!(!variables.is_empty(), "instance needs variables");
        assert_eq!(variables.len(), multiplicities.len());
        assert!(gap.0 >= 0, "instances are built with a non-negative gap");
        Instance {
            variables,
            multiplicities,
            gap,
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn multiplicities(&self) -> &Multiplicities {
        &self.multiplicities
    }

    pub fn gap(&self) -> Gap {
        self.gap
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    /// Serializes to the instance text format:
    /// a `gap G` header line, then one `l r m` line per variable.
    ///
    /// The output is canonical; `parse_instance` of it round-trips exactly.
    pub fn to_text(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "gap {}", self.gap.0);
        for (v, &m) in self.variables.iter().zip(self.multiplicities.0.iter()) {
            let _ = writeln!(out, "{} {} {}", v.left(), v.right(), m);
        }
        out
    }
}

/// Errors from instance validation and parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// A gain was zero (or negative in the text form).
    NonPositiveGain { index: usize },
    /// The target gap was negative.
    NegativeGap { gap: i64 },
    /// No variables given.
    EmptyInstance,
    /// Text input that does not follow the instance format.
    Parse { line: usize, message: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NonPositiveGain { index } => {
                write!(f, "variable {index}: gains must be >= 1")
            }
            ModelError::NegativeGap { gap } => write!(f, "target gap {gap} is negative"),
            ModelError::EmptyInstance => write!(f, "instance has no variables"),
            ModelError::Parse { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

/// Validates raw `(l, r, m)` triples into a canonical [`Instance`].
///
/// Gains are swapped into `l <= r` order; the input order of variables is
/// preserved.
pub fn validate_instance(raw: &[(u32, u32, u32)], gap: i64) -> Result<Instance, ModelError> {
    if raw.is_empty() {
        return Err(ModelError::EmptyInstance);
    }
    if gap < 0 {
        return Err(ModelError::NegativeGap { gap });
    }
    let mut variables = Vec::with_capacity(raw.len());
    let mut mult = Vec::with_capacity(raw.len());
    for (index, &(a, b, m)) in raw.iter().enumerate() {
        let v = Variable::try_new(a, b).ok_or(ModelError::NonPositiveGain { index })?;
        variables.push(v);
        mult.push(m);
    }
    Ok(Instance {
        variables,
        multiplicities: Multiplicities(mult),
        gap: Gap(gap),
    })
}

/// Parses the instance text format.
///
/// One header line `gap G`, then one `l r m` line per variable. Blank lines
/// and `#` comments (full-line or trailing) are ignored.
pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    let mut gap: Option<i64> = None;
    let mut raw: Vec<(u32, u32, u32)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let ln = lineno + 1;
        let parse_err = |message: String| ModelError::Parse { line: ln, message };
        if gap.is_none() {
            let rest = line
                .strip_prefix("gap")
                .ok_or_else(|| parse_err(String::from("expected `gap G` header")))?;
            let value: i64 = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(String::from("gap value is not an integer")))?;
            gap = Some(value);
        } else {
            let mut fields = line.split_whitespace();
            let mut next = |name: &str| -> Result<i64, ModelError> {
                fields
                    .next()
                    .ok_or_else(|| ModelError::Parse {
                        line: ln,
                        message: alloc::format!("missing {name}"),
                    })?
                    .parse()
                    .map_err(|_| ModelError::Parse {
                        line: ln,
                        message: alloc::format!("{name} is not an integer"),
                    })
            };
            let l = next("l")?;
            let r = next("r")?;
            let m = next("m")?;
            if fields.next().is_some() {
                return Err(parse_err(String::from("trailing fields after `l r m`")));
            }
            if l < 1 || r < 1 {
                return Err(ModelError::NonPositiveGain { index: raw.len() });
            }
            if !(0..=u32::MAX as i64).contains(&m) {
                return Err(parse_err(String::from("multiplicity out of range")));
            }
            raw.push((l as u32, r as u32, m as u32));
        }
    }
    let gap = gap.ok_or(ModelError::Parse {
        line: 0,
        message: String::from("missing `gap G` header"),
    })?;
    validate_instance(&raw, gap)
}

/// An exact node count of a branch-and-bound tree.
///
/// Full binary trees have odd node counts, so a `Finite` value is always odd
/// and at least 1. `Infeasible` marks states where no tree can close the gap
/// (it is absorbing under [`TreeSize::branch`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeSize {
    Finite(u128),
    Infeasible,
}

impl TreeSize {
    pub const LEAF: TreeSize = TreeSize::Finite(1);

    pub fn is_finite(&self) -> bool {
        matches!(self, TreeSize::Finite(_))
    }

    /// Returns the finite count, or `None` for `Infeasible`.
    pub fn finite(&self) -> Option<u128> {
        match self {
            TreeSize::Finite(n) => Some(*n),
            TreeSize::Infeasible => None,
        }
    }

    /// Combines two child sizes under a fresh root: `1 + left + right`.
    ///
    /// `Infeasible` absorbs; `None` signals 128-bit overflow.
    pub fn branch(left: TreeSize, right: TreeSize) -> Option<TreeSize> {
        match (left, right) {
            (TreeSize::Finite(a), TreeSize::Finite(b)) => {
                let sum = 1u128.checked_add(a)?.checked_add(b)?;
                Some(TreeSize::Finite(sum))
            }
            _ => Some(TreeSize::Infeasible),
        }
    }

    /// Minimum with `Infeasible` as the top element.
    pub fn min(self, other: TreeSize) -> TreeSize {
        match (self, other) {
            (TreeSize::Finite(a), TreeSize::Finite(b)) => TreeSize::Finite(a.min(b)),
            (TreeSize::Finite(a), TreeSize::Infeasible) => TreeSize::Finite(a),
            (TreeSize::Infeasible, other) => other,
        }
    }
}

impl fmt::Display for TreeSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeSize::Finite(n) => n.fmt(f),
            TreeSize::Infeasible => f.write_str("infeasible"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn orientation_swap() {
        let inst = validate_instance(&[(5, 2, 1)], 6).unwrap();
        assert_eq!(inst.variables()[0], Variable::new(2, 5));
        assert_eq!(inst.multiplicities().0, vec![1]);
        assert_eq!(inst.gap(), Gap(6));
    }

    #[test]
    fn two_variable_instance() {
        let inst = validate_instance(&[(2, 4, 1), (3, 3, 1)], 8).unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!(inst.variables()[0], Variable::new(2, 4));
        assert_eq!(inst.variables()[1], Variable::new(3, 3));
    }

    #[test]
    fn rejects_zero_gain() {
        assert_eq!(
            validate_instance(&[(0, 4, 1)], 8),
            Err(ModelError::NonPositiveGain { index: 0 })
        );
    }

    #[test]
    fn rejects_negative_gap_and_empty() {
        assert_eq!(
            validate_instance(&[(1, 1, 1)], -1),
            Err(ModelError::NegativeGap { gap: -1 })
        );
        assert_eq!(validate_instance(&[], 5), Err(ModelError::EmptyInstance));
    }

    #[test]
    fn dominance_examples() {
        assert!(Variable::new(5, 10).dominates(&Variable::new(5, 6)));
        assert!(!Variable::new(3, 3).dominates(&Variable::new(3, 3)));
        assert!(!Variable::new(2, 4).dominates(&Variable::new(3, 3)));
        assert!(!Variable::new(3, 3).dominates(&Variable::new(2, 4)));
    }

    #[test]
    fn text_round_trip() {
        let inst = validate_instance(&[(5, 6, 1), (9, 9, 1), (5, 10, 1)], 15).unwrap();
        let text = inst.to_text();
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_comments_and_blanks() {
        let text = "# header comment\n\ngap 8   # target\n2 4 1\n3 3 1 # balanced\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.gap(), Gap(8));
        assert_eq!(inst.len(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_instance("2 4 1\n"),
            Err(ModelError::Parse { .. })
        ));
        assert!(matches!(
            parse_instance("gap 5\n2 4\n"),
            Err(ModelError::Parse { .. })
        ));
        assert!(matches!(
            parse_instance("gap 5\n0 4 1\n"),
            Err(ModelError::NonPositiveGain { index: 0 })
        ));
    }

    #[test]
    fn tree_size_branch_combines() {
        let n = TreeSize::branch(TreeSize::Finite(3), TreeSize::Finite(5)).unwrap();
        assert_eq!(n, TreeSize::Finite(9));
        let inf = TreeSize::branch(TreeSize::Finite(3), TreeSize::Infeasible).unwrap();
        assert_eq!(inf, TreeSize::Infeasible);
        assert_eq!(
            TreeSize::branch(TreeSize::Finite(u128::MAX - 1), TreeSize::Finite(1)),
            None
        );
    }
}
