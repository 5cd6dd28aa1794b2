use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::IntMatrix;
use super::AbelianError;

/// A finitely generated abelian group `Z/q_1 ⊕ … ⊕ Z/q_r`, with `q_i = 0`
/// standing for a free summand `Z`.
///
/// Cloning is cheap; equality is structural on the order vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    orders: Arc<[BigInt]>,
}

impl FgAbGroup {
    /// Builds a group from summand orders. Orders equal to 1 are dropped.
    pub fn new<I, T>(orders: I) -> Result<Self, AbelianError>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut kept = Vec::new();
        for q in orders {
            let q = q.into();
            if q.is_negative() {
                return Err(AbelianError::NegativeOrder(q));
            }
            if !q.is_one() {
                kept.push(q);
            }
        }
        Ok(Self {
            orders: kept.into(),
        })
    }

    pub fn trivial() -> Self {
        Self {
            orders: Vec::new().into(),
        }
    }

    pub fn cyclic(q: impl Into<BigInt>) -> Self {
        Self::new([q]).expect("cyclic order must be non-negative")
    }

    pub fn free(rank: usize) -> Self {
        Self::new(vec![BigInt::zero(); rank]).unwrap()
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    /// Number of cyclic summands.
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_finite(&self) -> bool {
        self.orders.iter().all(|q| !q.is_zero())
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// Group order, or `None` for infinite groups.
    pub fn cardinality(&self) -> Option<BigInt> {
        if self.is_finite() {
            Some(self.orders.iter().product())
        } else {
            None
        }
    }

    /// Cardinality as a `usize`, when finite and small enough to enumerate.
    pub fn enumerable_size(&self) -> Option<usize> {
        self.cardinality().and_then(|c| c.to_usize())
    }

    /// Canonical reduction of a coordinate into summand `i`.
    pub fn reduce_coord(&self, i: usize, v: BigInt) -> BigInt {
        let q = &self.orders[i];
        if q.is_zero() {
            v
        } else {
            v.mod_floor(q)
        }
    }

    pub fn reduce(&self, coords: Vec<BigInt>) -> Vec<BigInt> {
        coords
            .into_iter()
            .enumerate()
            .map(|(i, v)| self.reduce_coord(i, v))
            .collect()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            group: self.clone(),
            coords: vec![BigInt::zero(); self.rank()],
        }
    }

    pub fn element(&self, coords: Vec<BigInt>) -> Result<GroupElement, AbelianError> {
        if coords.len() != self.rank() {
            return Err(AbelianError::Shape(format!(
                "element has {} coordinates, group has rank {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(GroupElement {
            group: self.clone(),
            coords: self.reduce(coords),
        })
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<GroupElement, AbelianError> {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The `i`-th standard generator.
    pub fn generator(&self, i: usize) -> GroupElement {
        let mut coords = vec![BigInt::zero(); self.rank()];
        coords[i] = BigInt::one();
        self.element(coords).unwrap()
    }

    /// Position of a canonical element in lexicographic order (last coordinate fastest).
    pub fn index_of(&self, e: &GroupElement) -> Option<usize> {
        let mut idx = BigInt::zero();
        for (q, c) in self.orders.iter().zip(&e.coords) {
            if q.is_zero() {
                return None;
            }
            idx = idx * q + c;
        }
        idx.to_usize()
    }

    /// Inverse of [`FgAbGroup::index_of`].
    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![BigInt::zero(); self.rank()];
        for i in (0..self.rank()).rev() {
            let q = self.orders[i].to_usize().expect("finite enumerable group");
            coords[i] = BigInt::from(index % q);
            index /= q;
        }
        GroupElement {
            group: self.clone(),
            coords,
        }
    }

    /// All elements of a finite group in index order.
    pub fn elements(&self) -> Result<Vec<GroupElement>, AbelianError> {
        let n = self
            .enumerable_size()
            .ok_or_else(|| AbelianError::Infinite(self.clone()))?;
        Ok((0..n).map(|i| self.element_at(i)).collect())
    }

    /// Whether `e` lies in `n·G`.
    pub fn is_multiple(&self, e: &GroupElement, n: &BigInt) -> bool {
        self.orders
            .iter()
            .zip(&e.coords)
            .all(|(q, c)| c.is_multiple_of(&n.gcd(q)))
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbGroup({self})")
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .orders
            .iter()
            .map(|q| {
                if q.is_zero() {
                    "Z".to_string()
                } else {
                    format!("Z/{q}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An element of an [`FgAbGroup`] in canonical coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    group: FgAbGroup,
    coords: Vec<BigInt>,
}

impl GroupElement {
    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn same_group(&self, other: &GroupElement) -> Result<(), AbelianError> {
        if Arc::ptr_eq(&self.group.orders, &other.group.orders) || self.group == other.group {
            Ok(())
        } else {
            Err(AbelianError::GroupMismatch {
                left: self.group.clone(),
                right: other.group.clone(),
            })
        }
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.same_group(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(GroupElement {
            coords: self.group.reduce(coords),
            group: self.group.clone(),
        })
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GroupElement {
        self.scalar_mul(&-BigInt::one())
    }

    pub fn scalar_mul(&self, n: &BigInt) -> GroupElement {
        let coords = self.coords.iter().map(|c| c * n).collect();
        GroupElement {
            coords: self.group.reduce(coords),
            group: self.group.clone(),
        }
    }

    /// In-place `self += n·other`; both must live in the same group.
    pub fn add_scaled(&mut self, n: &BigInt, other: &GroupElement) -> Result<(), AbelianError> {
        self.same_group(other)?;
        if n.is_zero() {
            return Ok(());
        }
        for (i, (a, b)) in self.coords.iter_mut().zip(&other.coords).enumerate() {
            let v = std::mem::take(a) + n * b;
            *a = self.group.reduce_coord(i, v);
        }
        Ok(())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.group)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A homomorphism given by an integer matrix (target rank × source rank),
/// acting on coordinate columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupHom {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Checks shape and well-definedness, then stores the matrix with rows
    /// reduced modulo the target orders.
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self, AbelianError> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(AbelianError::Shape(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        let mut matrix = matrix;
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                let v = std::mem::take(&mut matrix[(i, j)]);
                matrix[(i, j)] = target.reduce_coord(i, v);
            }
        }
        for (j, q) in source.orders().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let image = target.element(matrix.column(j))?.scalar_mul(q);
            if !image.is_zero() {
                return Err(AbelianError::IllDefined { column: j });
            }
        }
        Ok(Self {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(group: &FgAbGroup) -> Self {
        Self::new(group.clone(), group.clone(), IntMatrix::identity(group.rank())).unwrap()
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> Self {
        Self::new(
            source.clone(),
            target.clone(),
            IntMatrix::zeros(target.rank(), source.rank()),
        )
        .unwrap()
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement, AbelianError> {
        if x.group() != &self.source {
            return Err(AbelianError::GroupMismatch {
                left: self.source.clone(),
                right: x.group().clone(),
            });
        }
        self.apply_coords(x.coords())
    }

    pub fn apply_coords(&self, coords: &[BigInt]) -> Result<GroupElement, AbelianError> {
        let image = self.matrix.mul_vec(coords)?;
        self.target.element(image)
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom, AbelianError> {
        if inner.target != self.source {
            return Err(AbelianError::GroupMismatch {
                left: self.source.clone(),
                right: inner.target.clone(),
            });
        }
        let m = self.matrix.mul(&inner.matrix)?;
        GroupHom::new(inner.source.clone(), self.target.clone(), m)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}
