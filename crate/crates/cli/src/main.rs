use chemotaxis_cli::commands;

use std::process::ExitCode;

const USAGE: &str = "\
chemotaxis — finite-volume solver for a chemotaxis model with nonlinear consumption

USAGE:
    chemotaxis run <config>
    chemotaxis sweep-m <config> --m <m1,m2,...>
    chemotaxis convergence <config> --axis <space|time> --levels <N>
    chemotaxis verify --n <n1,n2,...>

Exit codes: 0 on success/PASS, 1 on check failure, 2 on usage or config errors.
Config files are `key = value` lines with `#` comments; see the README for keys.";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Returns Err only for usage/config problems (exit 2); commands report
/// check failures through the returned code.
fn dispatch(args: &[String]) -> Result<ExitCode, String> {
    let Some(cmd) = args.first() else {
        eprintln!("{USAGE}");
        return Ok(ExitCode::from(2));
    };
    match cmd.as_str() {
        "run" => {
            let path = one_positional(&args[1..], "run <config>")?;
            commands::cmd_run(&path)
        }
        "sweep-m" => {
            let (path, rest) = positional_and_flags(&args[1..], "sweep-m <config> --m <list>")?;
            let ms = parse_u32_list(&required_flag(&rest, "--m")?)?;
            commands::cmd_sweep_m(&path, &ms)
        }
        "convergence" => {
            let (path, rest) =
                positional_and_flags(&args[1..], "convergence <config> --axis <space|time> --levels <N>")?;
            let axis = match required_flag(&rest, "--axis")?.as_str() {
                "space" => commands::Axis::Space,
                "time" => commands::Axis::Time,
                other => return Err(format!("unknown axis `{other}`; use space or time")),
            };
            let levels: usize = required_flag(&rest, "--levels")?
                .parse()
                .map_err(|_| "levels must be a positive integer".to_string())?;
            commands::cmd_convergence(&path, axis, levels)
        }
        "verify" => {
            let flags = flags_only(&args[1..])?;
            let ns = parse_usize_list(&required_flag(&flags, "--n")?)?;
            commands::cmd_verify(&ns)
        }
        "--help" | "-h" | "help" => {
            println!("{USAGE}");
            Ok(ExitCode::SUCCESS)
        }
        other => Err(format!("unknown command `{other}`; run with --help for usage")),
    }
}

fn one_positional(args: &[String], usage: &str) -> Result<String, String> {
    match args {
        [p] => Ok(p.clone()),
        _ => Err(format!("expected exactly one argument: {usage}")),
    }
}

fn positional_and_flags(args: &[String], usage: &str) -> Result<(String, Vec<(String, String)>), String> {
    let mut positional = None;
    let flags = collect_flags(args, &mut positional)?;
    let path = positional.ok_or_else(|| format!("missing config path: {usage}"))?;
    Ok((path, flags))
}

fn flags_only(args: &[String]) -> Result<Vec<(String, String)>, String> {
    let mut positional = None;
    let flags = collect_flags(args, &mut positional)?;
    if let Some(p) = positional {
        return Err(format!("unexpected argument `{p}`"));
    }
    Ok(flags)
}

fn collect_flags(
    args: &[String],
    positional: &mut Option<String>,
) -> Result<Vec<(String, String)>, String> {
    let mut flags = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if let Some(name) = a.strip_prefix("--") {
            let value = it
                .next()
                .ok_or_else(|| format!("flag --{name} needs a value"))?;
            flags.push((format!("--{name}"), value.clone()));
        } else if positional.is_none() {
            *positional = Some(a.clone());
        } else {
            return Err(format!("unexpected extra argument `{a}`"));
        }
    }
    Ok(flags)
}

fn required_flag(flags: &[(String, String)], name: &str) -> Result<String, String> {
    flags
        .iter()
        .find(|(k, _)| k == name)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| format!("missing required flag {name}"))
}

fn parse_u32_list(text: &str) -> Result<Vec<u32>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| format!("bad integer `{s}` in list")))
        .collect()
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("bad integer `{s}` in list")))
        .collect()
}
