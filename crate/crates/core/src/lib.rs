//! Algorithms behind the decidability of the extension problem for targets
//! with finite higher homotopy: a universal difference-operator calculus on
//! sets with an action, finitely generated abelian group machinery, a finite
//! model of refined Postnikov towers carrying lifted actions, and the
//! decision procedure over explicit homotopy bookkeeping data.

pub mod abelian;
pub mod decide;
pub mod diffcalc;
pub mod format;
pub mod sample;
pub mod tower;
