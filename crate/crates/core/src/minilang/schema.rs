use std::sync::{Arc, OnceLock};

use crate::ast::{NodeTypeSchema, SchemaBuilder};

pub const SCHEMA_NAME: &str = "minilang";

/// Node types of the MiniLang frontend.
pub fn minilang_schema() -> Arc<NodeTypeSchema> {
    static SCHEMA: OnceLock<Arc<NodeTypeSchema>> = OnceLock::new();
    SCHEMA.get_or_init(|| Arc::new(build())).clone()
}

fn build() -> NodeTypeSchema {
    let mut b = SchemaBuilder::new(SCHEMA_NAME);
    b.abstract_type("Statement", None)
        .abstract_type("Expression", None);

    b.concrete("CompilationUnit", None).list("types");
    b.concrete("TypeDeclaration", None)
        .token("name")
        .token("interface")
        .list("bodyDeclarations");
    b.virtual_type("ClassDeclaration", "TypeDeclaration", "interface", "false");
    b.virtual_type("InterfaceDeclaration", "TypeDeclaration", "interface", "true");
    b.concrete("MethodDeclaration", None)
        .token("returnType")
        .token("name")
        .list("parameters")
        .child("body");
    b.concrete("SingleVariableDeclaration", None)
        .token("type")
        .token("name");
    b.concrete("FieldDeclaration", None)
        .token("type")
        .list("fragments");
    b.concrete("VariableDeclaration", None)
        .token("name")
        .child("initializer");
    b.concrete("CatchClause", None)
        .child("exception")
        .child("body");

    b.concrete("Block", Some("Statement")).list("statements");
    b.concrete("VariableDeclarationStatement", Some("Statement"))
        .token("type")
        .list("fragments");
    b.concrete("IfStatement", Some("Statement"))
        .child("expression")
        .child("thenStatement")
        .child("elseStatement");
    b.concrete("WhileStatement", Some("Statement"))
        .child("expression")
        .child("body");
    b.concrete("ForStatement", Some("Statement"))
        .list("initializers")
        .child("expression")
        .list("updaters")
        .child("body");
    b.concrete("ReturnStatement", Some("Statement"))
        .child("expression");
    b.concrete("BreakStatement", Some("Statement"));
    b.concrete("ContinueStatement", Some("Statement"));
    b.concrete("ThrowStatement", Some("Statement"))
        .child("expression");
    b.concrete("TryStatement", Some("Statement"))
        .child("body")
        .list("catchClauses");
    b.concrete("ExpressionStatement", Some("Statement"))
        .child("expression");

    b.concrete("MethodInvocation", Some("Expression"))
        .child("expression")
        .token("name")
        .list("arguments");
    b.concrete("Name", Some("Expression")).token("identifier");
    b.concrete("FieldAccess", Some("Expression"))
        .child("expression")
        .token("name");
    b.concrete("Assignment", Some("Expression"))
        .child("leftHandSide")
        .token("operator")
        .child("rightHandSide");
    b.concrete("InfixExpression", Some("Expression"))
        .child("leftOperand")
        .token("operator")
        .child("rightOperand");
    b.concrete("PrefixExpression", Some("Expression"))
        .token("operator")
        .child("operand");
    b.concrete("ClassInstanceCreation", Some("Expression"))
        .token("type")
        .list("arguments");
    b.concrete("NumberLiteral", Some("Expression")).token("token");
    b.concrete("StringLiteral", Some("Expression")).token("escapedValue");
    b.concrete("BooleanLiteral", Some("Expression")).token("booleanValue");

    b.build().expect("minilang schema is well formed")
}
