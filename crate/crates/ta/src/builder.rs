//! Incremental construction of templates and systems with early checks for
//! duplicate ids and dangling references.

use std::collections::HashSet;

use crate::error::BuildError;
use crate::expr::{Declarations, Expr, FuncDecl, Param, Type, VarDecl};
use crate::model::{Edge, Instance, Location, SystemModel, Template};
use crate::wellformed::well_formed;

#[derive(Debug, Clone)]
pub struct TemplateBuilder {
    name: String,
    params: Vec<Param>,
    declarations: Declarations,
    names: HashSet<String>,
    locations: Vec<Location>,
    ids: HashSet<String>,
    init: Option<String>,
    edges: Vec<Edge>,
}

impl TemplateBuilder {
    pub fn new(name: impl Into<String>) -> TemplateBuilder {
        TemplateBuilder {
            name: name.into(),
            params: Vec::new(),
            declarations: Declarations::new(),
            names: HashSet::new(),
            locations: Vec::new(),
            ids: HashSet::new(),
            init: None,
            edges: Vec::new(),
        }
    }

    pub fn param(&mut self, ty: Type, name: impl Into<String>) -> Result<&mut Self, BuildError> {
        let name = name.into();
        if !self.names.insert(name.clone()) {
            return Err(BuildError::DuplicateDeclaration(name));
        }
        self.params.push(Param { ty, name });
        Ok(self)
    }

    pub fn declare(&mut self, v: VarDecl) -> Result<&mut Self, BuildError> {
        if !self.names.insert(v.name.clone()) {
            return Err(BuildError::DuplicateDeclaration(v.name));
        }
        self.declarations.push_var(v);
        Ok(self)
    }

    pub fn declare_fn(&mut self, f: FuncDecl) -> Result<&mut Self, BuildError> {
        if !self.names.insert(f.name.clone()) {
            return Err(BuildError::DuplicateDeclaration(f.name));
        }
        self.declarations.push_func(f);
        Ok(self)
    }

    pub fn add_location(&mut self, loc: Location) -> Result<&mut Self, BuildError> {
        if !self.ids.insert(loc.id.clone()) {
            return Err(BuildError::DuplicateLocation(loc.id));
        }
        self.locations.push(loc);
        Ok(self)
    }

    pub fn has_location(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    pub fn set_init(&mut self, id: impl Into<String>) -> Result<&mut Self, BuildError> {
        let id = id.into();
        if !self.ids.contains(&id) {
            return Err(BuildError::DanglingLocation(id));
        }
        self.init = Some(id);
        Ok(self)
    }

    pub fn add_edge(&mut self, e: Edge) -> Result<&mut Self, BuildError> {
        for end in [&e.src, &e.dst] {
            if !self.ids.contains(end) {
                return Err(BuildError::DanglingLocation(end.clone()));
            }
        }
        self.edges.push(e);
        Ok(self)
    }

    pub fn finish(self) -> Result<Template, BuildError> {
        let init = self
            .init
            .ok_or_else(|| BuildError::NoInitialLocation(self.name.clone()))?;
        Ok(Template {
            name: self.name,
            params: self.params,
            declarations: self.declarations,
            locations: self.locations,
            init,
            edges: self.edges,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SystemBuilder {
    model: SystemModel,
    global_names: HashSet<String>,
    template_names: HashSet<String>,
    instance_names: HashSet<String>,
}

impl SystemBuilder {
    pub fn new() -> SystemBuilder {
        SystemBuilder::default()
    }

    pub fn declare(&mut self, v: VarDecl) -> Result<&mut Self, BuildError> {
        if !self.global_names.insert(v.name.clone()) {
            return Err(BuildError::DuplicateDeclaration(v.name));
        }
        self.model.globals.push_var(v);
        Ok(self)
    }

    pub fn declare_fn(&mut self, f: FuncDecl) -> Result<&mut Self, BuildError> {
        if !self.global_names.insert(f.name.clone()) {
            return Err(BuildError::DuplicateDeclaration(f.name));
        }
        self.model.globals.push_func(f);
        Ok(self)
    }

    pub fn declare_all(&mut self, decls: Declarations) -> Result<&mut Self, BuildError> {
        for d in decls.items {
            match d {
                crate::expr::Decl::Var(v) => self.declare(v)?,
                crate::expr::Decl::Func(f) => self.declare_fn(f)?,
            };
        }
        Ok(self)
    }

    pub fn add_template(&mut self, t: Template) -> Result<&mut Self, BuildError> {
        if !self.template_names.insert(t.name.clone()) {
            return Err(BuildError::DuplicateTemplate(t.name));
        }
        self.model.templates.push(t);
        Ok(self)
    }

    pub fn instantiate(
        &mut self,
        name: impl Into<String>,
        template: impl Into<String>,
        args: Vec<Expr>,
    ) -> Result<&mut Self, BuildError> {
        let name = name.into();
        if !self.instance_names.insert(name.clone()) {
            return Err(BuildError::DuplicateDeclaration(name));
        }
        self.model
            .instances
            .push(Instance::new(name, template, args));
        Ok(self)
    }

    /// Finalize, running the well-formedness check.
    pub fn finish(self) -> Result<SystemModel, BuildError> {
        let diags = well_formed(&self.model);
        if diags.is_empty() {
            Ok(self.model)
        } else {
            Err(BuildError::IllFormed(diags))
        }
    }

    /// Finalize without checking.
    pub fn finish_unchecked(self) -> SystemModel {
        self.model
    }
}
