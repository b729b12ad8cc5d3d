//! Right-angled Artin groups acting by analytic diffeomorphisms of the
//! interval and the circle.
//!
//! A RAAG embeds in the analytic diffeomorphism group of `[0, 1]` or of the
//! circle exactly when every connected component of its defining graph is
//! complete. This crate
//!
//! * decides that criterion with a certificate either way ([`raag`]),
//! * builds explicit embeddings `h_{i,n} = fⁱ gₙ f⁻ⁱ` from a Möbius family
//!   `gₙ` and a perturbed map `f` constructed stage by stage so that a
//!   truncated list of words acts nontrivially at a basepoint ([`synth`]),
//! * evaluates, inverts and analyses such maps numerically ([`diffeo`]),
//! * searches finite groups for the commuting-chain obstruction
//!   `[g₁,h₁] = [g₂,h₁] = [g₂,h₂] = 1 ≠ [g₁,h₂]` ([`obstruct`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decimal;
pub mod diffeo;
pub mod raag;
pub mod synth;
pub mod obstruct;
