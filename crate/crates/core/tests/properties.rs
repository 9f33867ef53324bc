mod common;

use common::*;

#[test]
fn ring_laws() {
    prop_ring_laws(512).unwrap();
}

#[test]
fn invert_round_trip() {
    prop_invert_round_trip(512).unwrap();
}

#[test]
fn u_v_sections() {
    prop_u_v_sections(512).unwrap();
}

#[test]
fn theta_leibniz() {
    prop_theta_leibniz(512).unwrap();
}

#[test]
fn pentagonal_against_naive_product() {
    pentagonal_oracle(2000).unwrap();
}

#[test]
fn kronecker_against_brute_force() {
    kronecker_oracle(10_000).unwrap();
}

#[test]
fn support_lattices() {
    support_oracle(500).unwrap();
}

#[test]
fn h_independent_of_family_order() {
    prop_h_uniqueness(16).unwrap();
}
