//! Ingest and emission for evaluation data: rater responses from CSV or
//! JSON lines, de-blinding keys and rating matrices from JSON, and the
//! plain-text / JSON renderings of tallies and heatmaps.
//!
//! Parse failures carry the 1-based line number of the offending row so
//! callers can point at it directly.

use serde::Serialize;
use std::io::{BufRead, Read};

use super::{
    BlindingKey, Choice, EvalError, Heatmap, LevelPair, PreferenceResponse, PreferenceTally,
    QuestionId, RatingMatrix,
};

/// Reads rater responses from CSV with columns `bundle_id`, `rater_id`,
/// `question`, `choice` (any order, extra columns ignored). Line numbers
/// in errors count file lines, header included.
pub fn read_responses_csv<R: Read>(reader: R) -> Result<Vec<PreferenceResponse>, EvalError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = csv_reader.headers().map_err(|e| csv_parse_error(&e))?.clone();
    let col = |name: &str| -> Result<usize, EvalError> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| EvalError::Parse {
                line: 1,
                detail: format!("missing required column {name:?}"),
            })
    };
    let bundle_col = col("bundle_id")?;
    let rater_col = col("rater_id")?;
    let question_col = col("question")?;
    let choice_col = col("choice")?;

    let mut responses = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(|e| csv_parse_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |idx: usize, name: &str| -> Result<&str, EvalError> {
            match record.get(idx) {
                Some(value) if !value.is_empty() => Ok(value),
                _ => Err(EvalError::Parse {
                    line,
                    detail: format!("empty or missing {name} field"),
                }),
            }
        };
        let question_text = field(question_col, "question")?;
        let question = QuestionId::parse(question_text).ok_or_else(|| EvalError::Parse {
            line,
            detail: format!("unknown question {question_text:?}"),
        })?;
        let choice_text = field(choice_col, "choice")?;
        let choice = Choice::parse(choice_text).ok_or_else(|| EvalError::Parse {
            line,
            detail: format!("unknown choice {choice_text:?} (expected left, right, or tie)"),
        })?;
        responses.push(PreferenceResponse {
            bundle_id: field(bundle_col, "bundle_id")?.to_owned(),
            rater_id: field(rater_col, "rater_id")?.to_owned(),
            question,
            choice,
        });
    }
    Ok(responses)
}

fn csv_parse_error(err: &csv::Error) -> EvalError {
    EvalError::Parse {
        line: err.position().map_or(0, |p| p.line()),
        detail: err.to_string(),
    }
}

/// Reads rater responses from JSON lines; blank lines are ignored.
pub fn read_responses_jsonl<R: BufRead>(reader: R) -> Result<Vec<PreferenceResponse>, EvalError> {
    let mut responses = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index as u64 + 1;
        let line = line.map_err(EvalError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let response: PreferenceResponse =
            serde_json::from_str(&line).map_err(|e| EvalError::Parse {
                line: line_no,
                detail: e.to_string(),
            })?;
        responses.push(response);
    }
    Ok(responses)
}

/// Reads a JSON array of de-blinding keys.
pub fn read_blinding_keys<R: Read>(mut reader: R) -> Result<Vec<BlindingKey>, EvalError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    serde_json::from_str(&text).map_err(|e| EvalError::Parse {
        line: e.line() as u64,
        detail: e.to_string(),
    })
}

/// Reads a rating matrix from a JSON array of count rows.
pub fn read_rating_matrix<R: Read>(mut reader: R) -> Result<RatingMatrix, EvalError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    serde_json::from_str(&text).map_err(|e| EvalError::Parse {
        line: e.line() as u64,
        detail: e.to_string(),
    })
}

/// Reads (empathy, suspense) level pairs from CSV with columns
/// `empathy` and `suspense`.
pub fn read_level_pairs_csv<R: Read>(reader: R) -> Result<Vec<LevelPair>, EvalError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader.headers().map_err(|e| csv_parse_error(&e))?.clone();
    let col = |name: &str| -> Result<usize, EvalError> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| EvalError::Parse {
                line: 1,
                detail: format!("missing required column {name:?}"),
            })
    };
    let empathy_col = col("empathy")?;
    let suspense_col = col("suspense")?;

    let mut pairs = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(|e| csv_parse_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        let level = |idx: usize, name: &str| -> Result<u8, EvalError> {
            let raw = record.get(idx).unwrap_or("");
            raw.parse::<u8>().map_err(|_| EvalError::Parse {
                line,
                detail: format!("{name} must be an integer 1..=5, got {raw:?}"),
            })
        };
        let pair = LevelPair::new(level(empathy_col, "empathy")?, level(suspense_col, "suspense")?)
            .map_err(|e| EvalError::Parse {
                line,
                detail: e.to_string(),
            })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

#[derive(Serialize)]
struct QuestionReport {
    question: QuestionId,
    dimension: &'static str,
    wins: u64,
    losses: u64,
    ties: u64,
    win_pct: f64,
    lose_pct: f64,
    tie_pct: f64,
    p_value: Option<f64>,
    significance: &'static str,
}

/// Pretty JSON report of a tally, derived percentages and significance
/// included; ends with a newline.
pub fn tally_to_json(tally: &PreferenceTally) -> String {
    let reports: Vec<QuestionReport> = tally
        .questions
        .iter()
        .map(|q| QuestionReport {
            question: q.question,
            dimension: q.question.dimension(),
            wins: q.wins,
            losses: q.losses,
            ties: q.ties,
            win_pct: q.win_pct(),
            lose_pct: q.lose_pct(),
            tie_pct: q.tie_pct(),
            p_value: q.p_value(),
            significance: q.significance(),
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&reports).expect("report serializes");
    out.push('\n');
    out
}

/// Aligned plain-text tally table: one row per question with
/// `Win% / Lose% / Tie%` percentages and the sign-test p-value.
/// Significance is marked `**` below 0.01 and `*` below 0.05.
pub fn render_tally_table(tally: &PreferenceTally) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14}  {:<23}  {}\n",
        "Dimension", "Win% / Lose% / Tie%", "p-value"
    ));
    for q in &tally.questions {
        let pcts = format!(
            "{:.1} / {:.1} / {:.1}",
            q.win_pct(),
            q.lose_pct(),
            q.tie_pct()
        );
        let p = match q.p_value() {
            Some(p) => {
                let stars = q.significance();
                if stars.is_empty() {
                    format!("{p:.6}")
                } else {
                    format!("{p:.6} {stars}")
                }
            }
            None => "n/a".to_owned(),
        };
        out.push_str(&format!("{:<14}  {pcts:<23}  {p}\n", q.question.dimension()));
    }
    out
}

/// Pretty JSON for a heatmap: the 5×5 count grid plus its total; ends
/// with a newline.
pub fn heatmap_to_json(map: &Heatmap) -> String {
    #[derive(Serialize)]
    struct HeatmapReport<'a> {
        counts: &'a [[u64; 5]; 5],
        total: u64,
    }
    let mut out = serde_json::to_string_pretty(&HeatmapReport {
        counts: map.counts(),
        total: map.total(),
    })
    .expect("heatmap serializes");
    out.push('\n');
    out
}

/// Aligned plain-text heatmap: empathy levels as rows, suspense levels
/// as columns.
pub fn render_heatmap(map: &Heatmap) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<18}", "empathy \\ suspense"));
    for s in 1..=5 {
        out.push_str(&format!("{s:>7}"));
    }
    out.push('\n');
    for e in 1..=5u8 {
        out.push_str(&format!("{e:<18}"));
        for s in 1..=5u8 {
            out.push_str(&format!("{:>7}", map.cell(e, s)));
        }
        out.push('\n');
    }
    out.push_str(&format!("total{:>44}\n", map.total()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{empathy_heatmap, tally, MethodSide, QuestionTally};

    const CSV_HEADER: &str = "bundle_id,rater_id,question,choice\n";

    #[test]
    fn csv_responses_round_trip_through_the_reader() {
        let csv = format!(
            "{CSV_HEADER}pair-1,r1,Suspense,left\npair-1,r2,logical_sense,tie\npair-1,r3,5,right\n"
        );
        let responses = read_responses_csv(csv.as_bytes()).unwrap();
        assert_eq!(responses.len(), 3);
        assert_eq!(responses[0].question, QuestionId::Suspense);
        assert_eq!(responses[0].choice, Choice::Left);
        assert_eq!(responses[1].question, QuestionId::LogicalSense);
        assert_eq!(responses[1].choice, Choice::Tie);
        assert_eq!(responses[2].question, QuestionId::Naturalness);
        assert_eq!(responses[2].choice, Choice::Right);
    }

    #[test]
    fn malformed_csv_rows_are_named_by_line() {
        let csv = format!("{CSV_HEADER}pair-1,r1,Suspense,left\npair-1,r2,Suspense,sideways\n");
        let err = read_responses_csv(csv.as_bytes()).unwrap_err();
        match err {
            EvalError::Parse { line, detail } => {
                assert_eq!(line, 3);
                assert!(detail.contains("sideways"), "{detail}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_columns_are_reported_on_the_header() {
        let err = read_responses_csv("bundle_id,rater_id,choice\n".as_bytes()).unwrap_err();
        assert!(
            matches!(err, EvalError::Parse { line: 1, ref detail } if detail.contains("question")),
            "{err:?}"
        );
    }

    #[test]
    fn unknown_question_is_a_parse_error() {
        let csv = format!("{CSV_HEADER}pair-1,r1,drama,left\n");
        let err = read_responses_csv(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, EvalError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn jsonl_responses_parse_with_line_numbered_errors() {
        let good = "{\"bundle_id\":\"pair-1\",\"rater_id\":\"r1\",\"question\":\"suspense\",\"choice\":\"left\"}\n\n{\"bundle_id\":\"pair-1\",\"rater_id\":\"r2\",\"question\":\"novelty\",\"choice\":\"tie\"}\n";
        let responses = read_responses_jsonl(good.as_bytes()).unwrap();
        assert_eq!(responses.len(), 2);

        let bad = "{\"bundle_id\":\"pair-1\",\"rater_id\":\"r1\",\"question\":\"suspense\",\"choice\":\"left\"}\nnot json\n";
        let err = read_responses_jsonl(bad.as_bytes()).unwrap_err();
        assert!(matches!(err, EvalError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn blinding_keys_and_matrices_load_from_json() {
        let keys =
            read_blinding_keys(r#"[{"bundle_id":"pair-1","method_side":"left"}]"#.as_bytes())
                .unwrap();
        assert_eq!(keys.len(), 1);
        assert_eq!(keys[0].method_side, MethodSide::Left);

        let matrix = read_rating_matrix("[[2,1],[1,2]]".as_bytes()).unwrap();
        assert_eq!(matrix.subjects(), 2);
        assert!(read_rating_matrix("[[2,1],[3,1]]".as_bytes()).is_err());
    }

    #[test]
    fn level_pair_csv_parses_and_validates() {
        let pairs = read_level_pairs_csv("empathy,suspense\n5,5\n1,3\n".as_bytes()).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].empathy(), 5);

        let err = read_level_pairs_csv("empathy,suspense\n6,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, EvalError::Parse { line: 2, .. }), "{err:?}");
    }

    fn all_win_tally() -> PreferenceTally {
        let keys = vec![BlindingKey {
            bundle_id: "pair-1".to_owned(),
            method_side: MethodSide::Left,
        }];
        let responses: Vec<PreferenceResponse> = (0..30)
            .map(|i| PreferenceResponse {
                bundle_id: "pair-1".to_owned(),
                rater_id: format!("r{i}"),
                question: QuestionId::Suspense,
                choice: Choice::Left,
            })
            .collect();
        tally(&responses, &keys).unwrap()
    }

    #[test]
    fn tally_table_contains_the_canonical_all_win_row() {
        let table = render_tally_table(&all_win_tally());
        assert!(table.contains("100.0 / 0.0 / 0.0"), "{table}");
        assert!(table.contains("Suspense"), "{table}");
        assert!(table.contains("**"), "30/0 is significant: {table}");
        // Questions with no responses render n/a rather than a p-value.
        assert!(table.contains("n/a"), "{table}");
    }

    #[test]
    fn tally_json_reports_counts_percentages_and_significance() {
        let json = tally_to_json(&all_win_tally());
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rows = parsed.as_array().unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0]["dimension"], "Suspense");
        assert_eq!(rows[0]["wins"], 30);
        assert_eq!(rows[0]["win_pct"], 100.0);
        assert_eq!(rows[0]["significance"], "**");
        assert_eq!(rows[1]["p_value"], serde_json::Value::Null);
        assert!(json.ends_with('\n'));
    }

    #[test]
    fn significant_rows_carry_stars_next_to_the_p_value() {
        let tally = PreferenceTally {
            questions: vec![QuestionTally {
                question: QuestionId::Novelty,
                wins: 9,
                losses: 1,
                ties: 0,
            }],
        };
        let table = render_tally_table(&tally);
        assert!(table.contains("0.021484 *"), "{table}");
    }

    #[test]
    fn heatmap_renders_grid_and_json() {
        let pairs = vec![
            LevelPair::new(5, 5).unwrap(),
            LevelPair::new(5, 5).unwrap(),
            LevelPair::new(1, 1).unwrap(),
        ];
        let map = empathy_heatmap(&pairs);
        let text = render_heatmap(&map);
        assert!(text.contains("empathy \\ suspense"));
        assert!(text.lines().count() >= 7);

        let json = heatmap_to_json(&map);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["total"], 3);
        assert_eq!(parsed["counts"][4][4], 2);
        assert_eq!(parsed["counts"][0][0], 1);
    }
}
