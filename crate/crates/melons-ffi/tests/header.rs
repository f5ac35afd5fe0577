//! Keeps the committed C header in step with the exported surface: the
//! build script regenerates include/melons.h before tests run, so a missing
//! declaration here means the header was hand-edited or generation broke.

const EXPORTS: &[&str] = &[
    "melon_context_new",
    "melon_context_free",
    "melon_string_free",
    "melon_last_error_message",
    "melon_count",
    "melon_count_capped",
    "melon_height_exact",
    "melon_height_decimal",
    "melon_convergence_ratio",
    "melon_dirichlet_constant",
    "melon_height_coefficient",
];

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/melons.h"))
        .expect("include/melons.h is committed");
    for name in EXPORTS {
        assert!(header.contains(name), "header is missing {name}");
    }
    assert!(header.contains("typedef struct MelonContext MelonContext"), "context must stay opaque");
    assert!(header.contains("MelonStatus_Ok = 0"), "status values are part of the ABI");
}
