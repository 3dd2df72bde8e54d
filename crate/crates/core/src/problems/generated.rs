// Generated by scripts/gen_manufactured.py. Do not edit by hand.
#![allow(clippy::all, unused_parens)]

use std::f64::consts::PI;

use super::ExactFields;

/// Fields of the smooth unit-square problem.
pub(crate) fn square_fields(x1: f64, x2: f64) -> ExactFields {
    let t0 = PI*x1;
    let t1 = t0.sin();
    let t2 = t1.powi(2);
    let t3 = 2.0*t2;
    let t4 = PI*x2;
    let t5 = t4.cos();
    let t6 = t4.sin();
    let t7 = t5*t6;
    let t8 = t6.powi(2);
    let t9 = t0.cos();
    let t10 = t1*t9;
    let t11 = t10*t8;
    let t12 = PI.powi(2);
    let t13 = 4.0*t12;
    let t14 = t10*t7;
    let t15 = t13*t14;
    let t16 = t5.powi(2);
    let t17 = -t16;
    let t18 = (t17 + t8);
    let t19 = t9.powi(2);
    let t20 = -t19;
    let t21 = (t2 + t20);
    let t22 = 2.0*t12;
    let t23 = t16*t2;
    let t24 = t19*t8;
    let t25 = 2.0*t0;
    let t26 = t25.cos();
    let t27 = 2.0*t4;
    let t28 = t27.cos();
    let t29 = t26*t28;
    let t30 = t25.sin();
    let t31 = t30.powi(2);
    let t32 = t27.sin();
    let t33 = 4.0*PI;
    let t34 = t32.powi(2);
    let t35 = t26*t30;
    let t36 = t34*t35;
    let t37 = 16.0*t12;
    let t38 = t30*t32;
    let t39 = t29*t38;
    let t40 = t37*t39;
    let t41 = t28.powi(2);
    let t42 = -t41;
    let t43 = (t34 + t42);
    let t44 = 8.0*t12;
    let t45 = t26.powi(2);
    let t46 = -t45;
    let t47 = t34*((t31 + t46));
    let t48 = t31*t41;
    let t49 = t34*t45;
    let t50 = 2.0*t28*t30;
    let t51 = t2*t7;
    let t52 = t1.powi(3)*t8*t9;
    let t53 = (((999.0 / 500.0))*t23 - (999.0 / 500.0)*t24);
    let t54 = (999.0*x1*x2 + 1.0);
    let t55 = t12*t54;
    let t56 = ((1.0 / 250.0))*t55;
    let t57 = 2.0*t26*t32;
    let t58 = t6.powi(3);
    let t59 = (((999.0 / 125.0))*t48 - (999.0 / 125.0)*t49);
    let t60 = 32.0*t12*t39;
    let mut f = ExactFields::default();
    f.y[0] = PI*t3*t7;
    f.y[1] = -2.0*PI*t11;
    f.grad_y[0][0] = t15;
    f.grad_y[0][1] = -t12*t18*t3;
    f.grad_y[1][0] = t21*t22*t8;
    f.grad_y[1][1] = -t15;
    f.omega = t22*((2.0*t2*t8 - t23 - t24));
    f.p = t29;
    f.w[0] = t28*t31*t32*t33;
    f.w[1] = -t33*t36;
    f.grad_w[0][0] = t40;
    f.grad_w[0][1] = -t31*t43*t44;
    f.grad_w[1][0] = t44*t47;
    f.grad_w[1][1] = -t40;
    f.theta = t44*((2.0*t31*t34 - t48 - t49));
    f.q = t38;
    f.state_op[0] = PI*(-t0*t53 + t13*t18*t52 - (999.0 / 125.0)*t14*t4 + t16*t44*t52 - t50 + 200.0*t51 + t56*t7*((3.0*t2 + t20)));
    f.state_op[1] = PI*(((999.0 / 125.0))*PI*t1*t5*t6*t9*x1 - t10*t56*((t17 + 3.0*t8)) - 200.0*t11 + 8.0*t12*t19*t2*t5*t58 + 4.0*t12*t2*t21*t5*t58 - t4*t53 - t57);
    f.adjoint_op[0] = PI*(-t0*t59 - t11*t31*t37*t43 + ((4.0 / 125.0))*t12*t28*t32*t54*(3.0*t31 + t46) + 400.0*t28*t31*t32 - (3996.0 / 125.0)*t39*t4 - t51*t60 - t57);
    f.adjoint_op[1] = PI*(-t11*t60 + ((3996.0 / 125.0))*PI*t26*t28*t30*t32*x1 - (4.0 / 125.0)*t35*t55*(3.0*t34 + t42) - 400.0*t36 - t37*t47*t51 - t4*t59 - t50);
    f
}

/// Fields of the boundary-layer unit-triangle problem.
pub(crate) fn triangle_fields(x1: f64, x2: f64) -> ExactFields {
    let t0 = 2.0*x2;
    let t1 = (x1 - 1.0);
    let t2 = (t1 + x2);
    let t3 = (-50.0_f64).exp();
    let t4 = ((1.0 - t3)).recip();
    let t5 = (-50.0*x1).exp();
    let t6 = (t1 + t4*((-t3 + t5)));
    let t7 = t2*t6;
    let t8 = t7*x1;
    let t9 = 50.0*t4;
    let t10 = (-t5*t9 + 1.0);
    let t11 = t2*x1;
    let t12 = t10*t11;
    let t13 = t6*x1;
    let t14 = 2.0*t13;
    let t15 = x2.powi(2);
    let t16 = t15*t2;
    let t17 = t13*x2;
    let t18 = t7*x2;
    let t19 = x1*x2;
    let t20 = t10*t2;
    let t21 = t19*t20;
    let t22 = t2.powi(2);
    let t23 = t22*t6;
    let t24 = t10*t22;
    let t25 = t24*x1;
    let t26 = 2.0*x1;
    let t27 = (t23 + t25 + t26*t7);
    let t28 = (t17 + t18 + t21 + t27);
    let t29 = t0*t28;
    let t30 = t2*x2;
    let t31 = t22*t4;
    let t32 = 1250.0*t31;
    let t33 = t5*x1;
    let t34 = t32*t33;
    let t35 = 2.0*t7;
    let t36 = 2.0*t15;
    let t37 = 4.0*t19;
    let t38 = t37*t7;
    let t39 = t10*t16;
    let t40 = (t15*t35 + t26*t39);
    let t41 = PI*t0;
    let t42 = (-50.0*x2).exp();
    let t43 = (-t42*t9 + 1.0);
    let t44 = t30*t43;
    let t45 = (t3 - t42);
    let t46 = (x2 - 1.0);
    let t47 = (-t4*t45 + t46);
    let t48 = t0*t47;
    let t49 = t2*t47;
    let t50 = x1.powi(2);
    let t51 = t2*t50;
    let t52 = t49*x1;
    let t53 = t47*x2;
    let t54 = t53*x1;
    let t55 = t2*t43;
    let t56 = t19*t55;
    let t57 = t22*t47;
    let t58 = t22*t43;
    let t59 = t58*x2;
    let t60 = (t0*t49 + t57 + t59);
    let t61 = (t52 + t54 + t56 + t60);
    let t62 = t26*t61;
    let t63 = t32*t42;
    let t64 = 2.0*t49;
    let t65 = 2.0*t50;
    let t66 = t47*t50;
    let t67 = t50*x2;
    let t68 = t43*t51;
    let t69 = (t0*t68 + t50*t64);
    let t70 = PI*t26;
    let t71 = -t10;
    let t72 = t19*t2;
    let t73 = -t6;
    let t74 = t19*t73;
    let t75 = t2.powi(2);
    let t76 = t71*x1;
    let t77 = t2*t73;
    let t78 = 1250.0*t4;
    let t79 = t15*t5;
    let t80 = t11*t79;
    let t81 = t78*t80;
    let t82 = t75*x2;
    let t83 = (t19 + 1000.0);
    let t84 = ((1.0 / 250.0))*t83;
    let t85 = 4.0*t17;
    let t86 = (-t10*t15*t26 + t2*t6*x1 - t36*t6 - t39 - t81 + t85);
    let t87 = 12.0*t19;
    let t88 = 4.0*t15;
    let t89 = (t0*t23 + t0*t25 + t13*t88 + 200.0*t15*t8);
    let t90 = ((1.0 / 512.0))*PI;
    let t91 = 3750.0*t31;
    let t92 = 7500.0*t4;
    let t93 = ((1.0 / 500.0))*t83;
    let t94 = 6.0*t15;
    let t95 = 100.0*t15;
    let t96 = 2500.0*t31;
    let t97 = t58*x1;
    let t98 = t0*t97;
    let t99 = (x2 - t4*t45 - 1.0);
    let t100 = 4.0*t99;
    let t101 = 100.0*t50;
    let t102 = t22*t99;
    let t103 = 4.0*t54;
    let t104 = t0*t43;
    let t105 = t42*t50;
    let t106 = t105*t30;
    let t107 = (t106*t78 + t68);
    let t108 = ((1.0 / 250.0))*t61;
    let t109 = t43*t67;
    let t110 = -t43;
    let t111 = -t47;
    let mut f = ExactFields::default();
    f.y[0] = -t0*t8*((t0 + t1));
    f.y[1] = t16*((t12 + t14 + t7));
    f.grad_y[0][0] = -t29;
    f.grad_y[0][1] = -t14*((t15 + t22 + 4.0*t30));
    f.grad_y[1][0] = t36*((t13 + t20*t26 + t24 + t34 + t35));
    f.grad_y[1][1] = t29;
    f.omega = (2.0*t14*t15 + 2.0*t15*t24 + 2.0*t15*t34 + 2.0*t23*x1 + 2.0*t38 + 2.0*t40);
    f.p = ((1.0 / 1024.0))*t41.cos();
    f.w[0] = -t51*((t44 + t48 + t49));
    f.w[1] = t0*t52*((t26 + t46));
    f.grad_w[0][0] = -t62;
    f.grad_w[0][1] = -t65*((t0*t55 + t53 + t58 + t63*x2 + t64));
    f.grad_w[1][0] = t48*((4.0*t11 + t22 + t50));
    f.grad_w[1][1] = t62;
    f.theta = (2.0*t0*t66 + 2.0*t37*t49 + 2.0*t50*t58 + 2.0*t57*x2 + 2.0*t63*t67 + 2.0*t69);
    f.q = ((1.0 / 1024.0))*t70.cos();
    f.state_op[0] = (-(1.0 / 250.0)*t15*(t26*t77 + t30*t73 + t71*t72 + t73*t75 + t74 + t75*t76) - 200.0*t19*t23 + ((1.0 / 500.0))*t2*t86*x1 - t23*t26 - t40 - t7*t87 - t84*((t0*t11*t71 + t0*t77 + 3.0*t11*t73 + t15*t73 + t15*t76 + t16*t71 - t19*t5*t75*t78 + t71*t82 + 4.0*t74 - t81)) - t89);
    f.state_op[1] = (t12*t94 + t15*t33*t96 - (1.0 / 250.0)*t19*t28 + t23*t95 + t24*t36 + t25*t95 + ((1.0 / 500.0))*t30*t86 + t38 + t7*t94 + t89 - t90*t41.sin() + t93*((-t10*t88*x1 + 62500.0*t15*t22*t4*t5*x1 - 4.0*t18 - 4.0*t21 - t27 - 6.0*t39 - t6*t88 - t79*t91 - t80*t92 - t85)));
    f.adjoint_op[0] = (t100*t67 + t100*t72 - t101*t102 - t101*t59 + t102*t26 + t108*t19 - (1.0 / 500.0)*t11*(t103 - t104*t50 - t107 + t2*t47*x2 - 2.0*t66) - 200.0*t30*t50*t99 + t42*t67*t96 + 6.0*t44*t50 + 6.0*t51*t99 + t58*t65 + t90*t70.sin() - t93*((-t103 - t105*t91 - t106*t92 - 4.0*t109 + 62500.0*t22*t4*t42*t50*x2 - 4.0*t52 - 4.0*t56 - t60 - 4.0*t66 - 6.0*t68)) + t98);
    f.adjoint_op[1] = (-t0*t57 - t108*t50 + 200.0*t2*t47*t50*x2 + 200.0*t22*t47*x1*x2 - t26*t57 - t49*t87 - 4.0*t50*t53 - t69 - t84*((t103 + t104*t11 + t107 + t109 + t19*t63 + t26*t49 + 3.0*t49*x2 + t66 + t97)) - t98 - (1.0 / 500.0)*x2*(t0*t110*t51 - t105*t78*t82 + t110*t50*t75 + 2.0*t111*t51 - 4.0*t111*t72 - t111*t82));
    f
}
