//! The bundled theory of Dutch tense and temporal adjuncts, and the sentence
//! annotations it is applied to.

mod annotation;

pub use annotation::{validate_annotation, Annotation, AnnotationError, Diagnostic, ANNOTATION_PREDICATES};

use crate::kr::{parse_theory, KrError, Theory};

pub const THEORY_SOURCE: &str = include_str!("../../theory/dutch.kr");
pub const LEXICON_SOURCE: &str = include_str!("../../theory/lexicon.kr");

/// Lexicon predicates. A verb without an entry simply lacks the property.
const LEXICON_PREDICATES: &[(&str, usize)] = &[
    ("verb_lex", 2),
    ("verb_vacuous", 1),
    ("verb_aux_kind", 2),
    ("verb_stative", 1),
    ("verb_telic", 1),
];

/// The theory and lexicon, without any sentence. Annotation predicates are
/// defined with empty extensions until an annotation is merged in.
pub fn load_theory() -> Theory {
    let mut theory = parse_theory(THEORY_SOURCE).expect("bundled theory parses");
    theory
        .merge(&parse_theory(LEXICON_SOURCE).expect("bundled lexicon parses"))
        .expect("bundled lexicon is consistent with the theory");
    for &(p, n) in ANNOTATION_PREDICATES.iter().chain(LEXICON_PREDICATES) {
        theory.ensure_defined(p, n).expect("annotation predicates are not open");
    }
    theory
}

/// The bundled theory extended with an annotation and any extra theory text.
pub fn theory_for(annotation: &Annotation, extra: &[Theory]) -> Result<Theory, KrError> {
    let mut theory = load_theory();
    theory.merge(annotation.theory())?;
    for t in extra {
        theory.merge(t)?;
    }
    Ok(theory)
}
