use std::collections::{BTreeSet, HashMap};

use super::{
    ActionSchema, Atom, Domain, GroundAtom, GroundLiteral, Literal, Object, Parameter, PddlError, PredicateDecl,
    Problem, Requirement, TypeDecl, ROOT_TYPE,
};

#[derive(Debug, Clone)]
enum Sexp {
    Symbol { text: String, pos: Pos },
    List { items: Vec<Sexp>, pos: Pos },
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol { pos, .. } | Sexp::List { pos, .. } => *pos,
        }
    }

    fn symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            Sexp::Symbol { .. } => None,
        }
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

/// Reads one top-level s-expression; identifiers are lowercased.
fn read_sexp(text: &str) -> Result<Sexp, PddlError> {
    let mut stack: Vec<(Pos, Vec<Sexp>)> = Vec::new();
    let mut result = None;
    let mut line = 1;
    let mut column = 0;
    let mut chars = text.chars().peekable();
    let mut in_comment = false;

    while let Some(c) = chars.next() {
        if c == '\n' {
            line += 1;
            column = 0;
            in_comment = false;
            continue;
        }
        column += 1;
        if in_comment || c.is_whitespace() {
            continue;
        }
        let pos = Pos { line, column };
        if result.is_some() {
            if c == ';' {
                in_comment = true;
                continue;
            }
            return Err(syntax(pos, "unexpected text after the closing parenthesis"));
        }
        match c {
            ';' => in_comment = true,
            '(' => stack.push((pos, Vec::new())),
            ')' => {
                let (open, items) = stack.pop().ok_or_else(|| syntax(pos, "unbalanced `)`"))?;
                let node = Sexp::List { items, pos: open };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(node),
                    None => result = Some(node),
                }
            }
            _ => {
                let mut s = String::new();
                s.extend(c.to_lowercase());
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    s.extend(n.to_lowercase());
                    column += 1;
                    chars.next();
                }
                let node = Sexp::Symbol { text: s, pos };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(node),
                    None => return Err(syntax(pos, "expected `(`")),
                }
            }
        }
    }
    if let Some((pos, _)) = stack.last() {
        return Err(syntax(*pos, "unclosed `(`"));
    }
    result.ok_or_else(|| syntax(Pos { line, column }, "empty input"))
}

fn expect_list<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp], PddlError> {
    s.list()
        .ok_or_else(|| syntax(s.pos(), format!("expected a list for {what}")))
}

fn expect_symbol<'a>(s: &'a Sexp, what: &str) -> Result<&'a str, PddlError> {
    s.symbol().ok_or_else(|| syntax(s.pos(), format!("expected {what}")))
}

/// Parses `a b - t c - u d` style typed lists. Untyped names get [`ROOT_TYPE`].
fn typed_list(items: &[Sexp]) -> Result<Vec<(String, String)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let sym = expect_symbol(&items[i], "a name")?;
        if sym == "-" {
            let ty_node = items
                .get(i + 1)
                .ok_or_else(|| syntax(items[i].pos(), "missing type after `-`"))?;
            if ty_node.list().is_some() {
                return Err(PddlError::Unsupported("either types".into()));
            }
            let ty = expect_symbol(ty_node, "a type name")?;
            if pending.is_empty() {
                return Err(syntax(items[i].pos(), "type without names"));
            }
            out.extend(pending.drain(..).map(|n| (n, ty.to_string())));
            i += 2;
        } else {
            pending.push(sym.to_string());
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| (n, ROOT_TYPE.to_string())));
    Ok(out)
}

/// Header `(define (<kind> <name>) ...)`; returns the name and remaining sections.
fn header<'a>(root: &'a Sexp, kind: &str) -> Result<(String, &'a [Sexp]), PddlError> {
    let items = expect_list(root, "define")?;
    match items.first().and_then(Sexp::symbol) {
        Some("define") => {}
        _ => return Err(syntax(root.pos(), "expected `(define ...)`")),
    }
    let head = items
        .get(1)
        .ok_or_else(|| syntax(root.pos(), format!("missing ({kind} <name>)")))?;
    let head_items = expect_list(head, kind)?;
    if head_items.len() != 2 || head_items[0].symbol() != Some(kind) {
        return Err(syntax(head.pos(), format!("expected ({kind} <name>)")));
    }
    let name = expect_symbol(&head_items[1], "a name")?.to_string();
    Ok((name, &items[2..]))
}

fn section_keyword(s: &Sexp) -> Result<(&str, &[Sexp]), PddlError> {
    let items = expect_list(s, "a section")?;
    let kw = items
        .first()
        .and_then(Sexp::symbol)
        .filter(|k| k.starts_with(':'))
        .ok_or_else(|| syntax(s.pos(), "expected a `:keyword` section"))?;
    Ok((kw, &items[1..]))
}

pub fn parse_domain(text: &str) -> Result<Domain, PddlError> {
    let root = read_sexp(text)?;
    let (name, sections) = header(&root, "domain")?;

    let mut requirements = BTreeSet::new();
    let mut types = Vec::new();
    let mut raw_predicates = Vec::new();
    let mut raw_actions = Vec::new();

    for sec in sections {
        let (kw, body) = section_keyword(sec)?;
        match kw {
            ":requirements" => {
                for r in body {
                    let r = expect_symbol(r, "a requirement")?;
                    let req =
                        Requirement::from_keyword(r).ok_or_else(|| PddlError::UnsupportedRequirement(r.to_string()))?;
                    requirements.insert(req);
                }
            }
            ":types" => {
                for (n, parent) in typed_list(body)? {
                    types.push(TypeDecl { name: n, parent });
                }
            }
            ":predicates" => {
                for p in body {
                    let items = expect_list(p, "a predicate declaration")?;
                    let pname = items
                        .first()
                        .ok_or_else(|| syntax(p.pos(), "empty predicate declaration"))?;
                    let pname = expect_symbol(pname, "a predicate name")?.to_string();
                    let params = typed_list(&items[1..])?
                        .into_iter()
                        .map(|(name, ty)| Parameter { name, ty })
                        .collect();
                    raw_predicates.push(PredicateDecl { name: pname, params });
                }
            }
            ":action" => raw_actions.push(sec),
            ":constants" => return Err(PddlError::Unsupported(":constants".into())),
            other => return Err(PddlError::Unsupported(other.to_string())),
        }
    }

    raw_predicates.sort_by(|a, b| a.name.cmp(&b.name));
    let index: HashMap<String, usize> = raw_predicates
        .iter()
        .enumerate()
        .map(|(i, p)| (p.name.clone(), i))
        .collect();

    let mut schemas = Vec::new();
    for sec in raw_actions {
        schemas.push(parse_action(sec, &raw_predicates, &index)?);
    }

    let domain = Domain {
        name,
        requirements,
        types,
        predicates: raw_predicates,
        schemas,
    };
    domain.validate()?;
    Ok(domain)
}

fn parse_action(
    sec: &Sexp,
    predicates: &[PredicateDecl],
    index: &HashMap<String, usize>,
) -> Result<ActionSchema, PddlError> {
    let items = expect_list(sec, "an action")?;
    let name = items.get(1).ok_or_else(|| syntax(sec.pos(), "action without a name"))?;
    let name = expect_symbol(name, "an action name")?.to_string();

    let mut params = Vec::new();
    let mut pre_node = None;
    let mut eff_node = None;
    let mut i = 2;
    while i < items.len() {
        let kw = expect_symbol(&items[i], "an action keyword")?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| syntax(items[i].pos(), format!("missing value for {kw}")))?;
        match kw {
            ":parameters" => {
                params = typed_list(expect_list(value, "parameters")?)?
                    .into_iter()
                    .map(|(name, ty)| Parameter { name, ty })
                    .collect();
            }
            ":precondition" => pre_node = Some(value),
            ":effect" => eff_node = Some(value),
            other => return Err(PddlError::Unsupported(other.to_string())),
        }
        i += 2;
    }

    let mut schema = ActionSchema {
        name,
        params,
        preconditions: BTreeSet::new(),
        add_effects: BTreeSet::new(),
        del_effects: BTreeSet::new(),
    };
    let ctx = LiftedContext {
        schema_name: &schema.name,
        params: &schema.params,
        predicates,
        index,
    };
    let mut pre = Vec::new();
    if let Some(node) = pre_node {
        ctx.conjunction(node, &mut pre)?;
    }
    let mut eff = Vec::new();
    if let Some(node) = eff_node {
        ctx.conjunction(node, &mut eff)?;
    }
    schema.preconditions = pre.into_iter().collect();
    for l in eff {
        if l.positive {
            schema.add_effects.insert(l.atom);
        } else {
            schema.del_effects.insert(l.atom);
        }
    }
    Ok(schema)
}

struct LiftedContext<'a> {
    schema_name: &'a str,
    params: &'a [Parameter],
    predicates: &'a [PredicateDecl],
    index: &'a HashMap<String, usize>,
}

impl LiftedContext<'_> {
    fn conjunction(&self, node: &Sexp, out: &mut Vec<Literal>) -> Result<(), PddlError> {
        let items = expect_list(node, "a formula")?;
        match items.first().and_then(Sexp::symbol) {
            None if items.is_empty() => Ok(()),
            Some("and") => {
                for c in &items[1..] {
                    self.conjunction(c, out)?;
                }
                Ok(())
            }
            Some("not") => {
                let inner = items
                    .get(1)
                    .filter(|_| items.len() == 2)
                    .ok_or_else(|| syntax(node.pos(), "`not` takes one argument"))?;
                out.push(Literal::neg(self.atom(inner)?));
                Ok(())
            }
            Some(op @ ("or" | "imply" | "forall" | "exists" | "when" | "=")) => {
                Err(PddlError::Unsupported(op.to_string()))
            }
            _ => {
                out.push(Literal::pos(self.atom(node)?));
                Ok(())
            }
        }
    }

    fn atom(&self, node: &Sexp) -> Result<Atom, PddlError> {
        let items = expect_list(node, "an atom")?;
        let pname = items.first().ok_or_else(|| syntax(node.pos(), "empty atom"))?;
        let pname = expect_symbol(pname, "a predicate name")?;
        let predicate = *self
            .index
            .get(pname)
            .ok_or_else(|| PddlError::UnknownPredicate(pname.to_string()))?;
        let mut args = Vec::new();
        for a in &items[1..] {
            let var = expect_symbol(a, "a parameter")?;
            if !var.starts_with('?') {
                return Err(PddlError::Unsupported(format!("constant `{var}`")));
            }
            let idx = self
                .params
                .iter()
                .position(|p| p.name == var)
                .ok_or_else(|| PddlError::UnknownParameter {
                    action: self.schema_name.to_string(),
                    name: var.to_string(),
                })?;
            args.push(idx);
        }
        let expected = self.predicates[predicate].arity();
        if args.len() != expected {
            return Err(PddlError::ArityMismatch {
                predicate: pname.to_string(),
                expected,
                found: args.len(),
            });
        }
        Ok(Atom { predicate, args })
    }
}

pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, PddlError> {
    let root = read_sexp(text)?;
    let (name, sections) = header(&root, "problem")?;
    let types = domain.type_hierarchy()?;

    let mut domain_name = None;
    let mut objects: Vec<Object> = Vec::new();
    let mut init_node = None;
    let mut goal_node = None;
    for sec in sections {
        let (kw, body) = section_keyword(sec)?;
        match kw {
            ":domain" => {
                let n = body.first().ok_or_else(|| syntax(sec.pos(), "missing domain name"))?;
                domain_name = Some(expect_symbol(n, "a domain name")?.to_string());
            }
            ":objects" => {
                for (n, ty) in typed_list(body)? {
                    types.check(&ty)?;
                    if objects.iter().any(|o| o.name == n) {
                        return Err(PddlError::Duplicate {
                            kind: "object",
                            name: n,
                        });
                    }
                    objects.push(Object { name: n, ty });
                }
            }
            ":init" => init_node = Some(body),
            ":goal" => goal_node = Some(body),
            ":requirements" => {}
            other => return Err(PddlError::Unsupported(other.to_string())),
        }
    }
    let domain_name = domain_name.ok_or_else(|| syntax(root.pos(), "missing (:domain ...)"))?;
    if domain_name != domain.name {
        return Err(PddlError::DomainMismatch {
            expected: domain.name.clone(),
            found: domain_name,
        });
    }

    let ctx = GroundContext {
        domain,
        objects: &objects,
        types: &types,
    };
    let mut init = BTreeSet::new();
    for node in init_node.unwrap_or(&[]) {
        init.insert(ctx.atom(node)?);
    }
    let mut goal = Vec::new();
    if let Some(body) = goal_node {
        for node in body {
            ctx.conjunction(node, &mut goal)?;
        }
    }
    goal.sort();
    goal.dedup();

    Ok(Problem {
        name,
        domain: domain_name,
        objects,
        init,
        goal,
    })
}

struct GroundContext<'a> {
    domain: &'a Domain,
    objects: &'a [Object],
    types: &'a super::TypeHierarchy,
}

impl GroundContext<'_> {
    fn conjunction(&self, node: &Sexp, out: &mut Vec<GroundLiteral>) -> Result<(), PddlError> {
        let items = expect_list(node, "a goal")?;
        match items.first().and_then(Sexp::symbol) {
            None if items.is_empty() => Ok(()),
            Some("and") => {
                for c in &items[1..] {
                    self.conjunction(c, out)?;
                }
                Ok(())
            }
            Some("not") => {
                let inner = items
                    .get(1)
                    .filter(|_| items.len() == 2)
                    .ok_or_else(|| syntax(node.pos(), "`not` takes one argument"))?;
                out.push(GroundLiteral {
                    atom: self.atom(inner)?,
                    positive: false,
                });
                Ok(())
            }
            Some(op @ ("or" | "imply" | "forall" | "exists" | "=")) => Err(PddlError::Unsupported(op.to_string())),
            _ => {
                out.push(GroundLiteral {
                    atom: self.atom(node)?,
                    positive: true,
                });
                Ok(())
            }
        }
    }

    fn atom(&self, node: &Sexp) -> Result<GroundAtom, PddlError> {
        let items = expect_list(node, "a ground atom")?;
        let pname = items.first().ok_or_else(|| syntax(node.pos(), "empty atom"))?;
        let pname = expect_symbol(pname, "a predicate name")?;
        let predicate = self
            .domain
            .predicate_index(pname)
            .ok_or_else(|| PddlError::UnknownPredicate(pname.to_string()))?;
        let decl = &self.domain.predicates[predicate];
        if decl.arity() != items.len() - 1 {
            return Err(PddlError::ArityMismatch {
                predicate: pname.to_string(),
                expected: decl.arity(),
                found: items.len() - 1,
            });
        }
        let mut args = Vec::new();
        for (a, param) in items[1..].iter().zip(&decl.params) {
            let oname = expect_symbol(a, "an object")?;
            let idx = self
                .objects
                .iter()
                .position(|o| o.name == oname)
                .ok_or_else(|| PddlError::UnknownObject(oname.to_string()))?;
            let oty = &self.objects[idx].ty;
            if !self.types.is_subtype(oty, &param.ty) {
                return Err(PddlError::TypeMismatch {
                    predicate: pname.to_string(),
                    argument: oname.to_string(),
                    expected: param.ty.clone(),
                    found: oty.clone(),
                });
            }
            args.push(idx);
        }
        Ok(GroundAtom { predicate, args })
    }
}
