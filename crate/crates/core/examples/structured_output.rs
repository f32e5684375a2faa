//! Recover JSON from typical model replies.
//!
//! ```text
//! cargo run --example structured_output
//! ```

use crewline::llm::extract_json;

fn main() {
    let replies = [
        r#"[{"company": "Thales"}]"#,
        "Sure! Here are the events:\n```json\n[{\"company\": \"Enedis\"}]\n```\nLet me know.",
        r#"The answer is {"category": "Recruitment"} as requested."#,
        "Recruitment",
        r#"{"unterminated": [1, 2"#,
    ];
    for reply in replies {
        match extract_json(reply) {
            Ok(v) => println!("ok    {v}"),
            Err(e) => println!("error {e}"),
        }
    }
}
