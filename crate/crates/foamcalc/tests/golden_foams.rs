//! Regression fixtures: closed-foam evaluations from the golden file must
//! reproduce exactly.

use foamcalc::{compile_word, FoamGen, GaussPoly, Ordering2};

fn parse_gen(token: &str) -> FoamGen {
    let (name, args) = match token.find('(') {
        Some(p) => {
            let name = &token[..p];
            let inner = token[p + 1..].trim_end_matches(')');
            let args: Vec<usize> = inner
                .split(',')
                .map(|a| a.trim().parse().expect("factor index"))
                .collect();
            (name, args)
        }
        None => (token, Vec::new()),
    };
    match name {
        "cup" => FoamGen::cup(),
        "cap" => FoamGen::cap(args[0]),
        "dot" => FoamGen::dot(args[0]),
        "merge" => FoamGen::merge(args[0], args[1]),
        "split" => FoamGen::split(args[0]),
        "annL" => FoamGen::annulus(args[0], Ordering2::Left),
        "annR" => FoamGen::annulus(args[0], Ordering2::Right),
        "vcreate" => FoamGen::vpair_create(args[0]),
        "vremove" => FoamGen::vpair_remove(args[0]),
        other => panic!("unknown generator {other}"),
    }
}

#[test]
fn golden_closed_foam_values() {
    let data = include_str!("data/closed_foam_values.txt");
    let mut checked = 0;
    for line in data.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (word_text, value_text) = line.split_once('=').expect("word = value");
        let word: Vec<FoamGen> = word_text.split_whitespace().map(parse_gen).collect();
        let expected: GaussPoly = value_text.trim().parse().expect("polynomial value");
        let (map, _) = compile_word(&word, 0).expect("closed word");
        let got = map.scalar().expect("closed evaluation");
        assert_eq!(got, expected, "value of `{}`", word_text.trim());
        checked += 1;
    }
    assert!(checked >= 20, "golden file should carry the full table");
}

#[test]
fn reversing_the_singular_ordering_negates() {
    // swap annL <-> annR in each golden word with singular circles
    let data = include_str!("data/closed_foam_values.txt");
    for line in data.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || !line.contains("annL") {
            continue;
        }
        let (word_text, _) = line.split_once('=').unwrap();
        let word: Vec<FoamGen> = word_text.split_whitespace().map(parse_gen).collect();
        let swapped: Vec<FoamGen> = word_text
            .split_whitespace()
            .map(|t| {
                parse_gen(
                    &t.replace("annL", "@@@")
                        .replace("annR", "annL")
                        .replace("@@@", "annR"),
                )
            })
            .collect();
        let n_sing = word_text
            .split_whitespace()
            .filter(|t| t.starts_with("ann"))
            .count();
        let (orig, _) = compile_word(&word, 0).unwrap();
        let (swap, _) = compile_word(&swapped, 0).unwrap();
        let sign = if n_sing % 2 == 0 { 1 } else { -1 };
        assert_eq!(
            orig.scalar().unwrap(),
            &swap.scalar().unwrap() * &GaussPoly::from_int(sign),
            "ordering reversal on `{}`",
            word_text.trim()
        );
    }
}
