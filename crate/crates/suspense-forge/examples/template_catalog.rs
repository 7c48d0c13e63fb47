//! Dump the versioned prompt template catalog and demonstrate strict
//! rendering: every `$variable` must be bound, unknown variables are
//! rejected, and values containing `$` are never re-expanded.
//!
//! ```sh
//! cargo run -p suspense-forge --example template_catalog
//! ```

use suspense_forge::prompt::{
    catalog, render, render_actions_list, sentence_cap_suffix, BindingMap, TemplateId,
    TEMPLATE_SET_VERSION,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The full catalog, exactly what `suspense-forge templates` prints.
    print!("{}", catalog());

    println!("\n== rendering, version {TEMPLATE_SET_VERSION} ==\n");

    // Strict substitution: one bound variable, byte-exact output.
    let bindings = BindingMap::new().with("genre", "locked-room mystery");
    let prompt = render(TemplateId::BackgroundNameOccupation, &bindings)?;
    println!("rendered: {prompt}");

    // Interim prompts get a sentence budget appended.
    println!("with cap: {prompt} {}", sentence_cap_suffix(4)?);

    // Prior actions are embedded as one bracketed list.
    let list = render_actions_list(&["case the vault", "forge the keycard"])?;
    println!("actions:  {list}");

    // Missing bindings fail loudly instead of rendering a hole.
    let err = render(TemplateId::BackgroundNameOccupation, &BindingMap::new()).unwrap_err();
    println!("missing binding → {err}");

    // Every template declares the variables it expects.
    println!("\nvariables by template:");
    for id in TemplateId::ALL {
        let vars = id.variables();
        if !vars.is_empty() {
            println!("  {:<24} {}", id.name(), vars.join(", "));
        }
    }
    Ok(())
}
