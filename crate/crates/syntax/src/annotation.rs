//! Timing directives `@b<int> @w<int> @d<int>` inside block comments.
//! Text around the directives is ignored, so comments such as
//! `/* invoc. delay @b1 @w1 @d10 */` are accepted.

use crate::ast::TimingAnnotation;
use crate::error::AnnotationError;

/// Parse the directives of a comment. The comment delimiters are optional.
/// A missing `@b` is 0; a missing `@w` equals the best case, so that an
/// annotation giving only a lower bound stays consistent.
pub fn extract_annotation(comment: &str) -> Result<TimingAnnotation, AnnotationError> {
    let text = comment.trim();
    let text = text.strip_prefix("/*").unwrap_or(text);
    let text = text.strip_suffix("*/").unwrap_or(text);
    let (mut best, mut worst, mut deadline) = (None, None, None);
    let mut rest = text;
    while let Some(at) = rest.find('@') {
        rest = &rest[at + 1..];
        let name_len = rest.chars().next().map_or(0, char::len_utf8);
        let name = &rest[..name_len];
        rest = &rest[name_len..];
        let digits_len = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        let digits = &rest[..digits_len];
        rest = &rest[digits_len..];
        let slot = match name {
            "b" => &mut best,
            "w" => &mut worst,
            "d" => &mut deadline,
            _ => return Err(AnnotationError::Unknown(name.to_string())),
        };
        let followed_by_junk = rest.starts_with(|c: char| c.is_alphanumeric() || c == '.');
        let value: u32 = match digits.parse() {
            Ok(v) if !followed_by_junk => v,
            _ => return Err(AnnotationError::NotAnInteger(name.to_string())),
        };
        if slot.replace(value).is_some() {
            return Err(AnnotationError::Duplicate(name.chars().next().unwrap()));
        }
    }
    let best = best.unwrap_or(0);
    let worst = worst.unwrap_or(best);
    if best > worst {
        return Err(AnnotationError::BestExceedsWorst { best, worst });
    }
    if deadline == Some(0) {
        return Err(AnnotationError::ZeroDeadline);
    }
    Ok(TimingAnnotation::new(best, worst, deadline))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directives_in_any_order() {
        assert_eq!(
            extract_annotation("/*@b2 @w4*/").unwrap(),
            TimingAnnotation::new(2, 4, None)
        );
        assert_eq!(
            extract_annotation("/*@b1 @w1 @d10*/").unwrap(),
            TimingAnnotation::new(1, 1, Some(10))
        );
        assert_eq!(
            extract_annotation(" @d7   @w3 @b1 ").unwrap(),
            TimingAnnotation::new(1, 3, Some(7))
        );
        assert_eq!(extract_annotation("").unwrap(), TimingAnnotation::default());
    }

    #[test]
    fn surrounding_text_is_ignored() {
        assert_eq!(
            extract_annotation(" invoc. delay @b1 @w1 @d10").unwrap(),
            TimingAnnotation::new(1, 1, Some(10))
        );
        assert_eq!(
            extract_annotation(" specified here: @b2 @w4").unwrap(),
            TimingAnnotation::new(2, 4, None)
        );
        assert_eq!(
            extract_annotation("   @d50").unwrap(),
            TimingAnnotation::new(0, 0, Some(50))
        );
    }

    #[test]
    fn lower_bound_only() {
        assert_eq!(
            extract_annotation("@b1").unwrap(),
            TimingAnnotation::new(1, 1, None)
        );
    }

    #[test]
    fn malformed_directives() {
        assert_eq!(
            extract_annotation("@bx"),
            Err(AnnotationError::NotAnInteger("b".into()))
        );
        assert_eq!(
            extract_annotation("@w2.5"),
            Err(AnnotationError::NotAnInteger("w".into()))
        );
        assert_eq!(
            extract_annotation("@b1 @b2"),
            Err(AnnotationError::Duplicate('b'))
        );
        assert_eq!(
            extract_annotation("@x3"),
            Err(AnnotationError::Unknown("x".into()))
        );
        assert_eq!(
            extract_annotation("@b4 @w2"),
            Err(AnnotationError::BestExceedsWorst { best: 4, worst: 2 })
        );
        assert_eq!(
            extract_annotation("@d0"),
            Err(AnnotationError::ZeroDeadline)
        );
    }
}
