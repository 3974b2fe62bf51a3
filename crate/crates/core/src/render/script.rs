//! Export of a scene config as a Blender Python script.
//!
//! The script is produced from a fixed template by `{{KEY}}` substitution and
//! is never executed here. Floats are written in shortest round-trip form so
//! identical configs give identical bytes.

use crate::scene_config::{ObjectAnimation, SceneConfig, SceneType};

const TEMPLATE: &str = r#"# Generated scene script for Blender (Cycles). Do not edit by hand.
import math
import bpy
from mathutils import Vector

SEED = {{SEED}}
N_FRAMES = {{N_FRAMES}}
FPS = {{FPS}}
OBJECT_REF = "{{OBJECT_REF}}"
OBJECT_ANIMATION = {{OBJECT_ANIMATION}}
FOCUS_TYPE = "{{FOCUS_TYPE}}"
FOCUS_POSITION = "{{FOCUS_POSITION}}"
MOVEMENT_TYPE = "{{MOVEMENT_TYPE}}"
MOVEMENT_VALUE = {{MOVEMENT_VALUE}}
CAMERA_START = Vector({{CAMERA_START}})
COVERAGE = {{COVERAGE}}
LIGHTS = [{{LIGHTS}}]
AMBIENT = {{AMBIENT}}
SCENE_TYPE = "{{SCENE_TYPE}}"
SCENE_COLOR = {{SCENE_COLOR}}
BACKGROUND_COLOR = {{BACKGROUND_COLOR}}
RESOLUTION = ({{WIDTH}}, {{HEIGHT}})
QUALITY = "{{QUALITY}}"


def setup_render(scene):
    scene.render.engine = "CYCLES"
    scene.render.resolution_x, scene.render.resolution_y = RESOLUTION
    scene.render.fps = FPS
    scene.frame_start = 0
    scene.frame_end = N_FRAMES - 1
    scene.cycles.seed = SEED % (2 ** 31)
    scene.cycles.samples = 256 if QUALITY == "High" else 32
    if QUALITY == "Low":
        scene.render.resolution_percentage = 50


def setup_world(scene):
    world = scene.world or bpy.data.worlds.new("World")
    scene.world = world
    world.use_nodes = True
    bg = world.node_tree.nodes["Background"]
    bg.inputs[1].default_value = AMBIENT
    if SCENE_TYPE == "Basic":
        bpy.ops.mesh.primitive_cube_add(size=30.0)
        room = bpy.context.active_object
        room.name = "Room"
        mat = bpy.data.materials.new("RoomMaterial")
        mat.diffuse_color = (*SCENE_COLOR, 1.0)
        room.data.materials.append(mat)
        bpy.ops.object.mode_set(mode="EDIT")
        bpy.ops.mesh.flip_normals()
        bpy.ops.object.mode_set(mode="OBJECT")
    else:
        bg.inputs[0].default_value = BACKGROUND_COLOR
        scene.render.film_transparent = BACKGROUND_COLOR[3] < 1.0


def setup_lights():
    for i, (position, kelvin, intensity) in enumerate(LIGHTS):
        data = bpy.data.lights.new(f"Light{i}", type="POINT")
        data.energy = 1000.0 * intensity
        data.use_nodes = True
        emission = data.node_tree.nodes["Emission"]
        blackbody = data.node_tree.nodes.new("ShaderNodeBlackbody")
        blackbody.inputs[0].default_value = kelvin
        data.node_tree.links.new(blackbody.outputs[0], emission.inputs[0])
        light = bpy.data.objects.new(f"Light{i}", data)
        light.location = Vector(position)
        bpy.context.collection.objects.link(light)


def load_object():
    builtin = {
        "cube": lambda: bpy.ops.mesh.primitive_cube_add(size=1.2),
        "sphere": lambda: bpy.ops.mesh.primitive_uv_sphere_add(radius=1.0),
        "torus": lambda: bpy.ops.mesh.primitive_torus_add(major_radius=0.7, minor_radius=0.3),
        "cylinder": lambda: bpy.ops.mesh.primitive_cylinder_add(radius=0.6, depth=1.4),
    }
    if OBJECT_REF in builtin:
        builtin[OBJECT_REF]()
    else:
        bpy.ops.wm.obj_import(filepath=OBJECT_REF)
    return bpy.context.selected_objects[0]


def animate_object(obj):
    kind, value = OBJECT_ANIMATION
    for k in range(N_FRAMES):
        t = k / FPS
        if kind == "spin":
            obj.rotation_euler[2] = math.radians(value * t)
            obj.keyframe_insert("rotation_euler", frame=k)
        elif kind == "translate":
            obj.location = Vector(value) * t
            obj.keyframe_insert("location", frame=k)


def focus_target(obj, t):
    radius = max(obj.dimensions) / 2.0
    offset = {"Upper": 0.75 * radius, "Center": 0.0, "Lower": -0.75 * radius}[FOCUS_POSITION]
    center = Vector(obj.location)
    if OBJECT_ANIMATION[0] == "translate":
        center = Vector(OBJECT_ANIMATION[1]) * t
    return center + Vector((0.0, 0.0, offset))


def animate_camera(obj):
    cam_data = bpy.data.cameras.new("Camera")
    cam_data.sensor_fit = "VERTICAL"
    cam_data.sensor_height = 24.0
    cam = bpy.data.objects.new("Camera", cam_data)
    bpy.context.collection.objects.link(cam)
    bpy.context.scene.camera = cam
    target0 = focus_target(obj, 0.0)
    radius = max(obj.dimensions) / 2.0
    distance = (target0 - CAMERA_START).length
    focal0 = COVERAGE * 12.0 * distance / radius
    forward0 = (target0 - CAMERA_START).normalized()
    right0 = forward0.cross(Vector((0.0, 0.0, 1.0))).normalized()
    for k in range(N_FRAMES):
        s = k / (N_FRAMES - 1)
        amount = s * MOVEMENT_VALUE
        aim = focus_target(obj, k / FPS) if FOCUS_TYPE == "Follow" else target0
        position = CAMERA_START.copy()
        focal = focal0
        if MOVEMENT_TYPE == "Truck":
            position = CAMERA_START + right0 * amount
        elif MOVEMENT_TYPE == "Dolly":
            position = CAMERA_START + forward0 * amount
        elif MOVEMENT_TYPE == "Pedestal":
            position = CAMERA_START + Vector((0.0, 0.0, amount))
        elif MOVEMENT_TYPE == "Spin":
            a = math.radians(amount)
            rel = CAMERA_START - target0
            position = aim + Vector((rel.x * math.cos(a) - rel.y * math.sin(a),
                                     rel.x * math.sin(a) + rel.y * math.cos(a), rel.z))
        elif MOVEMENT_TYPE == "Following":
            position = CAMERA_START + (focus_target(obj, k / FPS) - target0)
        elif MOVEMENT_TYPE == "Zoom":
            focal = focal0 + amount
        cam.location = position
        direction = aim - position
        cam.rotation_euler = direction.to_track_quat("-Z", "Y").to_euler()
        if MOVEMENT_TYPE == "Tilt":
            cam.rotation_euler.rotate_axis("X", math.radians(amount))
        elif MOVEMENT_TYPE == "Pan":
            cam.rotation_euler.rotate_axis("Y", math.radians(amount))
        cam_data.lens = focal
        cam.keyframe_insert("location", frame=k)
        cam.keyframe_insert("rotation_euler", frame=k)
        cam_data.keyframe_insert("lens", frame=k)


def main():
    bpy.ops.wm.read_factory_settings(use_empty=True)
    scene = bpy.context.scene
    setup_render(scene)
    setup_world(scene)
    setup_lights()
    obj = load_object()
    animate_object(obj)
    animate_camera(obj)


if __name__ == "__main__":
    main()
"#;

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn tuple(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| num(*v)).collect();
    format!("({})", parts.join(", "))
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Blender script text for `cfg`. Byte-identical for identical configs.
pub fn emit_engine_script(cfg: &SceneConfig) -> String {
    let cam = &cfg.camera;
    let animation = match cfg.object_animation {
        ObjectAnimation::None => "(\"none\", 0.0)".to_string(),
        ObjectAnimation::Spin(rate) => format!("(\"spin\", {})", num(rate)),
        ObjectAnimation::Translate(v) => format!("(\"translate\", {})", tuple(&v)),
    };
    let lights: Vec<String> = cfg
        .lighting
        .lights
        .iter()
        .map(|l| format!("({}, {}, {})", tuple(&l.position), num(l.color_temp), num(l.intensity)))
        .collect();
    let scene_color = match (cfg.environment.scene_type, cfg.environment.scene_color) {
        (SceneType::Basic, Some(c)) => tuple(&c),
        _ => "None".to_string(),
    };
    let background = match cfg.environment.background_color {
        Some(c) => tuple(&c),
        None => "(0.0, 0.0, 0.0, 1.0)".to_string(),
    };
    let substitutions: [(&str, String); 19] = [
        ("SEED", cfg.seed.to_string()),
        ("N_FRAMES", cfg.n_frames.to_string()),
        ("FPS", cfg.fps.to_string()),
        ("OBJECT_REF", escape(&cfg.object_ref)),
        ("OBJECT_ANIMATION", animation),
        ("FOCUS_TYPE", format!("{:?}", cam.focus_type)),
        ("FOCUS_POSITION", format!("{:?}", cam.focus_position)),
        ("MOVEMENT_TYPE", cam.movement_type.name().to_string()),
        ("MOVEMENT_VALUE", num(cam.movement_value)),
        ("CAMERA_START", tuple(&cam.initial_position)),
        ("COVERAGE", num(cam.coverage)),
        ("LIGHTS", lights.join(", ")),
        ("AMBIENT", num(cfg.lighting.ambient_intensity)),
        ("SCENE_TYPE", cfg.environment.scene_type.name().to_string()),
        ("SCENE_COLOR", scene_color),
        ("BACKGROUND_COLOR", background),
        ("WIDTH", cfg.render.width.to_string()),
        ("HEIGHT", cfg.render.height.to_string()),
        ("QUALITY", format!("{:?}", cfg.render.quality)),
    ];
    let mut text = TEMPLATE.to_string();
    for (key, value) in &substitutions {
        text = text.replace(&format!("{{{{{key}}}}}"), value);
    }
    text
}
