mod common;

use common::examples;

#[test]
fn m_person_is_an_entity_mapping() {
    examples::m_person().unwrap();
}

#[test]
fn npd_quadrant_is_a_merged_one_to_many() {
    examples::npd_quadrant().unwrap();
}

#[test]
fn uobm_fabricated_role_is_constant_alignment() {
    examples::uobm_constant().unwrap();
}

#[test]
fn stod_language_tags_survive() {
    examples::stod_language_tags().unwrap();
}
