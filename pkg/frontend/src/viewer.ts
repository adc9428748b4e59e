/**
 * three.js rendering of the shared model.
 *
 * Clipping happens against the replica's plane in model space (before
 * orientation/scale/anchor), matching how the session core classifies
 * triangles.  Fragment mode discards per pixel in the shader; polygon
 * mode drops whole triangles by the centroid rule, and that same
 * centroid path is what visibilityMask() exports for parity checking.
 *
 * Inner faces render at a darkening factor of the base color with no
 * specular term, so a cut-open model reads as solid tissue.
 */
import * as THREE from "three";

import { classifyCentroid, Plane } from "./math";
import { ModelState } from "./replica";
import { RenderSettings } from "./session";

const VERT = /* glsl */ `
    varying vec3 vModelPos;
    varying vec3 vNormal;
    void main() {
        vModelPos = position;
        vNormal = normalMatrix * normal;
        gl_Position = projectionMatrix * modelViewMatrix * vec4(position, 1.0);
    }
`;

const FRAG = /* glsl */ `
    uniform vec4 uPlane;        // a, b, c, d with unit normal
    uniform float uClipEnabled; // 1.0 in fragment mode, 0.0 in polygon mode
    uniform vec3 uBaseColor;
    uniform float uDarken;
    varying vec3 vModelPos;
    varying vec3 vNormal;
    void main() {
        float dist = dot(uPlane.xyz, vModelPos) - uPlane.w;
        if (uClipEnabled > 0.5 && dist < 0.0) discard;
        vec3 n = normalize(vNormal);
        if (!gl_FrontFacing) n = -n;
        // headlight diffuse only; inner faces get the darkening factor
        float diffuse = 0.25 + 0.75 * max(n.z, 0.0);
        vec3 color = uBaseColor * diffuse;
        if (!gl_FrontFacing) color *= uDarken;
        gl_FragColor = vec4(color, 1.0);
    }
`;

export interface ViewerMesh {
    vertices: number[];   // flat xyz triples
    triangles: number[];  // flat index triples
}

/** Per-triangle visibility of the mesh as the viewer would draw it in
 * polygon mode; this is the exported mask used for parity checks. */
export function visibilityMask(mesh: ViewerMesh, plane: Plane): boolean[] {
    return classifyCentroid(mesh.vertices, mesh.triangles, plane);
}

export class ModelView {
    readonly object: THREE.Mesh;
    private geometry: THREE.BufferGeometry;
    private readonly material: THREE.ShaderMaterial;
    private mesh: ViewerMesh | null = null;
    private fullIndex: Uint32Array = new Uint32Array(0);

    constructor(private readonly settings: RenderSettings) {
        this.geometry = new THREE.BufferGeometry();
        this.material = new THREE.ShaderMaterial({
            vertexShader: VERT,
            fragmentShader: FRAG,
            side: THREE.DoubleSide,
            uniforms: {
                uPlane: { value: new THREE.Vector4(0, 0, 1, -1000) },
                uClipEnabled: { value: 1.0 },
                uBaseColor: { value: new THREE.Color(0xb5453c) },
                uDarken: { value: settings.innerDarkening },
            },
        });
        this.object = new THREE.Mesh(this.geometry, this.material);
        this.object.frustumCulled = false;  // clip plane changes the extent
    }

    setMesh(mesh: ViewerMesh): void {
        this.mesh = mesh;
        this.fullIndex = Uint32Array.from(mesh.triangles);
        const position = new THREE.Float32BufferAttribute(mesh.vertices, 3);
        const geometry = new THREE.BufferGeometry();
        geometry.setAttribute("position", position);
        geometry.setIndex(new THREE.BufferAttribute(this.fullIndex.slice(), 1));
        geometry.computeVertexNormals();
        this.geometry.dispose();
        this.geometry = geometry;
        this.object.geometry = geometry;
    }

    /** Pull pose, zoom, anchor, and plane from the replica's state. */
    apply(model: ModelState): void {
        const q = model.orientation;
        this.object.quaternion.set(q.x, q.y, q.z, q.w);  // three is xyzw
        this.object.scale.setScalar(model.scale);
        this.object.position.set(model.anchor[0], model.anchor[1], model.anchor[2]);
        const p = model.plane;
        this.material.uniforms.uPlane.value.set(p.a, p.b, p.c, p.d);
        this.material.uniforms.uDarken.value = this.settings.innerDarkening;
        if (this.settings.clipMode === "fragment") {
            this.material.uniforms.uClipEnabled.value = 1.0;
            this.restoreFullIndex();
        } else {
            this.material.uniforms.uClipEnabled.value = 0.0;
            this.applyPolygonClip(p);
        }
    }

    private restoreFullIndex(): void {
        const index = this.geometry.getIndex();
        if (index && index.count !== this.fullIndex.length) {
            this.geometry.setIndex(new THREE.BufferAttribute(this.fullIndex.slice(), 1));
        }
    }

    private applyPolygonClip(plane: Plane): void {
        if (this.mesh === null) return;
        const mask = visibilityMask(this.mesh, plane);
        const kept: number[] = [];
        for (let t = 0; t < mask.length; t++) {
            if (mask[t]) {
                kept.push(this.fullIndex[3 * t], this.fullIndex[3 * t + 1],
                          this.fullIndex[3 * t + 2]);
            }
        }
        this.geometry.setIndex(new THREE.BufferAttribute(Uint32Array.from(kept), 1));
    }
}

export interface ViewerHandle {
    view: ModelView;
    render: () => void;
    resize: () => void;
}

/** Wire a canvas up with a fixed headlight camera; returns the handles
 * the session loop drives. */
export function createViewer(canvas: HTMLCanvasElement,
                             settings: RenderSettings): ViewerHandle {
    const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    const scene = new THREE.Scene();
    scene.background = new THREE.Color(0x10141a);
    const camera = new THREE.PerspectiveCamera(40, 1, 0.01, 500);
    camera.position.set(0, 0, 4);
    camera.lookAt(0, 0, 0);

    const view = new ModelView(settings);
    scene.add(view.object);

    const resize = () => {
        const w = canvas.clientWidth || 800;
        const h = canvas.clientHeight || 600;
        renderer.setSize(w, h, false);
        camera.aspect = w / h;
        camera.updateProjectionMatrix();
    };
    resize();
    return { view, render: () => renderer.render(scene, camera), resize };
}
